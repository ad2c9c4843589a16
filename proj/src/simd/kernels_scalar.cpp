#include "biphoton/simd/kernels.hpp"

namespace biphoton::simd {
namespace {

cplx dot_conj_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    re += xr * yr + xi * yi;
    im += xi * yr - xr * yi;
  }
  return {re, im};
}

double norm_sq_scalar(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
  return acc;
}

void combine2_scalar(cplx a, const cplx* u, cplx b, const cplx* v, cplx* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = a.real() * u[k].real() - a.imag() * u[k].imag() + b.real() * v[k].real() -
                      b.imag() * v[k].imag();
    const double im = a.real() * u[k].imag() + a.imag() * u[k].real() + b.real() * v[k].imag() +
                      b.imag() * v[k].real();
    out[k] = {re, im};
  }
}

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = a.real() * x[k].real() - a.imag() * x[k].imag();
    const double im = a.real() * x[k].imag() + a.imag() * x[k].real();
    y[k] = {y[k].real() + re, y[k].imag() + im};
  }
}

void scale_scalar(double s, cplx* x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) x[k] = {x[k].real() * s, x[k].imag() * s};
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_conj_scalar, norm_sq_scalar, combine2_scalar,
                                 axpy_scalar, scale_scalar};
  return table;
}

}  // namespace biphoton::simd
