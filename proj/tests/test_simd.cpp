#include <doctest.h>

#include <random>
#include <vector>

#include "biphoton/simd/kernels.hpp"

using namespace biphoton::simd;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* fast = avx2_kernels();
  if (!fast) {
    MESSAGE("AVX2 kernels unavailable on this machine");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(1);
  for (std::size_t n : {0, 1, 2, 3, 5, 8, 17, 64, 1001, 2001}) {
    const auto x = random_vec(n, rng), y = random_vec(n, rng);
    CHECK(rel(fast->dot_conj(x.data(), y.data(), n), ref.dot_conj(x.data(), y.data(), n)) < 1e-13);
    CHECK(fast->norm_sq(x.data(), n) == doctest::Approx(ref.norm_sq(x.data(), n)).epsilon(1e-13));

    const cplx a(0.3, -1.2), b(-0.7, 0.4);
    std::vector<cplx> o1(n), o2(n);
    fast->combine2(a, x.data(), b, y.data(), o1.data(), n);
    ref.combine2(a, x.data(), b, y.data(), o2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(o1[k], o2[k]) < 1e-14);

    o1 = y;
    o2 = y;
    fast->axpy(a, x.data(), o1.data(), n);
    ref.axpy(a, x.data(), o2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(o1[k], o2[k]) < 1e-14);

    o1 = x;
    o2 = x;
    fast->scale(1.7, o1.data(), n);
    ref.scale(1.7, o2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(o1[k] == o2[k]);
  }
}

TEST_CASE("active table is one of the two") {
  const KernelTable& t = active_kernels();
  CHECK((&t == &scalar_kernels() || &t == avx2_kernels()));
}
