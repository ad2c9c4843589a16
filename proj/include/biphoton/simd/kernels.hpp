#pragma once

// Complex double inner loops used by quadrature, joint amplitude assembly and
// the rank-revealing factorization. A scalar reference table is always
// available; an AVX2/FMA table is compiled on x86-64 and chosen at runtime
// when the CPU supports it. Set BIPHOTON_SIMD=scalar to force the reference.

#include <complex>
#include <cstddef>
#include <span>

namespace biphoton::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;
  // sum_k x[k] * conj(y[k])
  cplx (*dot_conj)(const cplx* x, const cplx* y, std::size_t n);
  // sum_k |x[k]|^2
  double (*norm_sq)(const cplx* x, std::size_t n);
  // out[k] = a*u[k] + b*v[k]
  void (*combine2)(cplx a, const cplx* u, cplx b, const cplx* v, cplx* out, std::size_t n);
  // y[k] += a*x[k]
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // x[k] *= s
  void (*scale)(double s, cplx* x, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

/// Table picked once per process.
const KernelTable& active_kernels();

inline cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y) {
  return active_kernels().dot_conj(x.data(), y.data(), x.size());
}

inline double norm_sq(std::span<const cplx> x) {
  return active_kernels().norm_sq(x.data(), x.size());
}

inline void combine2(cplx a, std::span<const cplx> u, cplx b, std::span<const cplx> v,
                     std::span<cplx> out) {
  active_kernels().combine2(a, u.data(), b, v.data(), out.data(), out.size());
}

inline void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  active_kernels().axpy(a, x.data(), y.data(), y.size());
}

inline void scale(double s, std::span<cplx> x) { active_kernels().scale(s, x.data(), x.size()); }

}  // namespace biphoton::simd
