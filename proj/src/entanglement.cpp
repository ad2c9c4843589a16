#include "biphoton/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/simd/kernels.hpp"

namespace biphoton {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double entropy_of_weights(double a, double b) {
  double s = 0.0;
  for (double w : {a, b})
    if (w > 0.0) s -= w * std::log2(w);
  return s;
}

struct Factorization {
  Eigen::VectorXd singular;
  Eigen::MatrixXcd left;   // n x k, unit columns
  Eigen::MatrixXcd right;  // n x k, A = left * diag(singular) * right^T
  double discarded;
};

// Weighted matrix A_ij = sqrt(w_i) F_ij sqrt(w_j), row-major.
std::vector<cplx> weighted_matrix(const TwoPhotonAmplitude& amp, std::span<const double> sqrt_w) {
  const std::size_t n = amp.size();
  std::vector<cplx> a(amp.values().begin(), amp.values().end());
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] *= sqrt_w[i] * sqrt_w[j];
  });
  return a;
}

Factorization dense_svd(const std::vector<cplx>& a, std::size_t n) {
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), n, n);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ComputationError("dense SVD failed");
  // A = U S V^H, so the tau_2 factor is conj(V)
  return {svd.singularValues(), svd.matrixU(), svd.matrixV().conjugate(), 0.0};
}

// Pivoted modified Gram-Schmidt on the rows of A (with one reorthogonalization pass),
// stopped once the unfactored remainder has Frobenius norm <= tol: A = C Q + E with
// orthonormal rows in Q. The thin SVD of C = U S W^H then gives A = U S (W^H Q) + E, and
// every singular value not returned is bounded by |E|_F.
std::optional<Factorization> rank_revealing_svd(std::vector<cplx> a, std::size_t n, double tol,
                                                std::size_t max_rank) {
  std::vector<double> row_norms(n);
  auto refresh_norms = [&] {
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) row_norms[i] = simd::norm_sq({a.data() + i * n, n});
    });
    return std::accumulate(row_norms.begin(), row_norms.end(), 0.0);
  };

  std::vector<std::vector<cplx>> basis;
  std::vector<std::vector<cplx>> coeff;  // coeff[k][i] = <q_k, row_i>
  double remainder = refresh_norms();
  while (remainder > tol * tol) {
    if (basis.size() == max_rank) return std::nullopt;
    const auto pivot = static_cast<std::size_t>(
        std::max_element(row_norms.begin(), row_norms.end()) - row_norms.begin());
    std::vector<cplx> q(a.begin() + static_cast<std::ptrdiff_t>(pivot * n),
                        a.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * n));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& prev : basis) simd::axpy(-simd::dot_conj(q, prev), prev, q);
    }
    const double qn = std::sqrt(simd::norm_sq(q));
    if (!(qn > 0.0)) break;
    simd::scale(1.0 / qn, q);

    std::vector<cplx> c(n, cplx{});
    for (int pass = 0; pass < 2; ++pass) {
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          std::span<cplx> row(a.data() + i * n, n);
          const cplx proj = simd::dot_conj(row, q);
          simd::axpy(-proj, q, row);
          c[i] += proj;
        }
      });
    }
    basis.push_back(std::move(q));
    coeff.push_back(std::move(c));
    remainder = refresh_norms();
  }

  const std::size_t k = basis.size();
  Factorization out;
  out.discarded = std::sqrt(std::max(remainder, 0.0));
  if (k == 0) {
    out.singular.resize(0);
    out.left.resize(static_cast<Eigen::Index>(n), 0);
    out.right.resize(static_cast<Eigen::Index>(n), 0);
    return out;
  }
  Eigen::MatrixXcd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::MatrixXcd q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));  // columns = q_k
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t i = 0; i < n; ++i) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = coeff[m][i];
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = basis[m][i];
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // A ~ C Q^T (rows of Q^T are the q_k) = U S W^H Q^T, so the tau_2 factor is (W^H Q^T)^T = Q conj(W)
  out.singular = svd.singularValues();
  out.left = svd.matrixU();
  out.right = q * svd.matrixV().conjugate();
  return out;
}

}  // namespace

EntanglementReport schmidt_analytic(double J_abs, const BeamSplitter& bs, Outcome outcome) {
  if (!std::isfinite(J_abs) || J_abs < 0.0 || J_abs > 1.0) throw InvalidArgument("|J| must lie in [0, 1]");
  const double j2 = J_abs * J_abs;
  double plus = 0.0, minus = 0.0;
  if (outcome == Outcome::Out11) {
    const double p11 = outcome_probabilities(J_abs, bs).p11;
    if (!(p11 > kDegenerateProbability))
      throw DegenerateOutcomeError("|1,1> vanishes for |J| = 1 at t^2 = 1/2");
    const double P = path_indistinguishability(bs);
    const double jc2 = 1.0 - j2;
    const double d = P * P + 0.5 * jc2 * (1.0 - P * P);
    const double root = std::sqrt(j2 * jc2 * (P - 1.0) * (P - 1.0) + std::pow(P - jc2 * (P - 1.0), 2));
    plus = clamp01((d + P * root) / (2.0 * d));
    minus = clamp01((d - P * root) / (2.0 * d));
  } else {
    const double denom = 2.0 * (1.0 + j2);
    plus = (1.0 + J_abs) * (1.0 + J_abs) / denom;
    minus = (1.0 - J_abs) * (1.0 - J_abs) / denom;
  }
  return {outcome, entropy_of_weights(plus, minus), plus, minus, J_abs, bs.t_sq()};
}

double von_neumann_entropy(std::span<const double> coefficients) {
  double total = 0.0;
  for (double l : coefficients) {
    if (!std::isfinite(l) || l < 0.0) throw NormalizationError("Schmidt coefficients must be finite and >= 0");
    total += l * l;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw NormalizationError(fmt::format("Schmidt coefficients square-sum to {:.9g}, not 1", total));
  double s = 0.0;
  for (double l : coefficients) {
    const double w = l * l;
    if (w > 0.0) s -= w * std::log2(w);
  }
  return s;
}

std::vector<double> SchmidtDecomposition::weights() const {
  std::vector<double> w;
  w.reserve(coefficients.size());
  for (double l : coefficients) w.push_back(l * l);
  return w;
}

SchmidtDecomposition schmidt_numeric(const TwoPhotonAmplitude& amp, const SchmidtOptions& options) {
  const TimeGrid& grid = amp.grid();
  const std::size_t n = grid.size();
  std::vector<double> sqrt_w(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_w[i] = std::sqrt(grid.weight(i));

  std::vector<cplx> a = weighted_matrix(amp, sqrt_w);
  std::optional<Factorization> f;
  if (options.method != SvdMethod::Dense)
    f = rank_revealing_svd(a, n, 1e-2 * options.truncation, options.max_rank);
  if (!f) {
    if (options.method == SvdMethod::RankRevealing)
      throw ComputationError("rank-revealing factorization exceeded the rank cap");
    f = dense_svd(a, n);
  }

  SchmidtDecomposition out{{}, {}, {}, grid, f->discarded};
  for (Eigen::Index m = 0; m < f->singular.size(); ++m) {
    const double s = f->singular(m);
    if (s < options.truncation) {
      out.discarded_bound = std::hypot(out.discarded_bound, s);
      continue;
    }
    std::vector<cplx> mode_a(n), mode_b(n);
    for (std::size_t i = 0; i < n; ++i) {
      mode_a[i] = f->left(static_cast<Eigen::Index>(i), m) / sqrt_w[i];
      mode_b[i] = f->right(static_cast<Eigen::Index>(i), m) / sqrt_w[i];
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(mode_a[i]) > std::abs(mode_a[peak])) peak = i;
    const cplx phase = std::polar(1.0, -std::arg(mode_a[peak]));
    for (std::size_t i = 0; i < n; ++i) {
      mode_a[i] *= phase;
      mode_b[i] /= phase;
    }
    out.coefficients.push_back(s);
    out.modes_a.push_back(TemporalShape::from_samples(grid, std::move(mode_a)));
    out.modes_b.push_back(TemporalShape::from_samples(grid, std::move(mode_b)));
  }
  return out;
}

Eigen::MatrixXcd mode_overlaps(const SchmidtDecomposition& d, const TemporalShape& f1, const TemporalShape& f2) {
  const auto v1 = sample(f1, d.grid).shape;
  const auto v2 = sample(f2, d.grid).shape;
  Eigen::MatrixXcd out(2, static_cast<Eigen::Index>(d.modes_a.size()));
  for (std::size_t k = 0; k < d.modes_a.size(); ++k) {
    const auto& mode = d.modes_a[k].samples()->values;
    out(0, static_cast<Eigen::Index>(k)) = d.grid.inner(mode, v1.samples()->values);
    out(1, static_cast<Eigen::Index>(k)) = d.grid.inner(mode, v2.samples()->values);
  }
  return out;
}

std::vector<SurfaceCell> entropy_surface(Outcome outcome, Range J_range, Range t_sq_range, std::size_t J_points,
                                         std::size_t t_points) {
  auto check = [](Range r, const char* what) {
    if (!(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi))
      throw InvalidArgument(std::string(what) + " range must satisfy 0 <= lo <= hi <= 1");
  };
  check(J_range, "J_abs");
  check(t_sq_range, "t_sq");
  if (J_points == 0 || t_points == 0) throw InvalidArgument("entropy surface needs at least one point per axis");
  auto axis = [](Range r, std::size_t count, std::size_t i) {
    if (count == 1) return r.lo;
    return i + 1 == count ? r.hi : r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  };

  std::vector<SurfaceCell> cells(J_points * t_points);
  parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double J = axis(J_range, J_points, idx / t_points);
      const double t_sq = axis(t_sq_range, t_points, idx % t_points);
      SurfaceCell cell{J, t_sq, std::nullopt};
      try {
        cell.entropy = schmidt_analytic(J, BeamSplitter::from_t_sq(t_sq), outcome).entropy;
      } catch (const DegenerateOutcomeError&) {
      }
      cells[idx] = cell;
    }
  });
  return cells;
}

void write_surface_csv(std::span<const SurfaceCell> cells, Outcome outcome, std::ostream& out) {
  out << "J_abs,t_sq,outcome,entropy\n";
  fmt::memory_buffer buf;
  const auto name = outcome_name(outcome);
  for (const SurfaceCell& c : cells) {
    if (c.entropy)
      fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{},{:.17g}\n", c.J_abs, c.t_sq, name, *c.entropy);
    else
      fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{},\n", c.J_abs, c.t_sq, name);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace biphoton
