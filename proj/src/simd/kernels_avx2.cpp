// Compiled with -mavx2 -mfma. Only reached through avx2_kernels() after a
// runtime CPU check, so nothing here may run on older hardware.

#include <immintrin.h>

#include "biphoton/simd/kernels.hpp"

namespace biphoton::simd::detail {
namespace {

// Two complex doubles per register, interleaved [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// a*x for a broadcast complex scalar: x*[ar,ar] + swap(x)*[-ai,ai]
inline __m256d cmul_scalar(__m256d x, __m256d a_re, __m256d a_im_signed) {
  return _mm256_fmadd_pd(x, a_re, _mm256_mul_pd(swap_re_im(x), a_im_signed));
}

cplx dot_conj_avx2(const cplx* x, const cplx* y, std::size_t n) {
  // acc_rr collects [xr*yr, xi*yi], acc_ri collects [xr*yi, xi*yr]
  __m256d acc_rr0 = _mm256_setzero_pd(), acc_rr1 = _mm256_setzero_pd();
  __m256d acc_ri0 = _mm256_setzero_pd(), acc_ri1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x0 = load2(x + k), x1 = load2(x + k + 2);
    const __m256d y0 = load2(y + k), y1 = load2(y + k + 2);
    acc_rr0 = _mm256_fmadd_pd(x0, y0, acc_rr0);
    acc_rr1 = _mm256_fmadd_pd(x1, y1, acc_rr1);
    acc_ri0 = _mm256_fmadd_pd(x0, swap_re_im(y0), acc_ri0);
    acc_ri1 = _mm256_fmadd_pd(x1, swap_re_im(y1), acc_ri1);
  }
  for (; k + 2 <= n; k += 2) {
    const __m256d x0 = load2(x + k), y0 = load2(y + k);
    acc_rr0 = _mm256_fmadd_pd(x0, y0, acc_rr0);
    acc_ri0 = _mm256_fmadd_pd(x0, swap_re_im(y0), acc_ri0);
  }
  const __m256d rr = _mm256_add_pd(acc_rr0, acc_rr1);
  const __m256d ri = _mm256_add_pd(acc_ri0, acc_ri1);
  double re = hsum(rr);
  // imaginary part: xi*yr - xr*yi = odd lanes minus even lanes of ri
  const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
  double im = hsum(_mm256_mul_pd(ri, sign));
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].imag() * y[k].real() - x[k].real() * y[k].imag();
  }
  return {re, im};
}

double norm_sq_avx2(const cplx* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x0 = load2(x + k), x1 = load2(x + k + 2);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  for (; k + 2 <= n; k += 2) {
    const __m256d x0 = load2(x + k);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
  return acc;
}

void combine2_avx2(cplx a, const cplx* u, cplx b, const cplx* v, cplx* out, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set_pd(a.imag(), -a.imag(), a.imag(), -a.imag());
  const __m256d br = _mm256_set1_pd(b.real());
  const __m256d bi = _mm256_set_pd(b.imag(), -b.imag(), b.imag(), -b.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d u0 = load2(u + k), v0 = load2(v + k);
    store2(out + k, _mm256_add_pd(cmul_scalar(u0, ar, ai), cmul_scalar(v0, br, bi)));
  }
  for (; k < n; ++k) out[k] = a * u[k] + b * v[k];
}

void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set_pd(a.imag(), -a.imag(), a.imag(), -a.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d x0 = load2(x + k), y0 = load2(y + k);
    store2(y + k, _mm256_add_pd(y0, cmul_scalar(x0, ar, ai)));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

void scale_avx2(double s, cplx* x, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) store2(x + k, _mm256_mul_pd(load2(x + k), sv));
  for (; k < n; ++k) x[k] *= s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot_conj_avx2, norm_sq_avx2, combine2_avx2, axpy_avx2,
                                 scale_avx2};
  return table;
}

}  // namespace biphoton::simd::detail
