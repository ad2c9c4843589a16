#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/beamsplitter.hpp"

namespace biphoton {

/// Closed-form Schmidt spectrum of one output component.
struct EntanglementReport {
  Outcome outcome;
  double entropy;  // bits
  double lambda_sq_plus;
  double lambda_sq_minus;
  double J_abs;
  double t_sq;
};

/// Schmidt weights from |J| and the splitting ratio.
///
/// |1,1>: with P = t^2 - r^2 and Jc^2 = 1 - |J|^2,
///   D = P^2 + Jc^2 (1 - P^2) / 2
///   |l+-|^2 = (D +- P sqrt(|J|^2 Jc^2 (P - 1)^2 + (P - Jc^2 (P - 1))^2)) / (2 D)
/// |2,0>, |0,2>: |l+-|^2 = (1 +- |J|)^2 / (2 (1 + |J|^2)), independent of t.
///
/// Throws DegenerateOutcomeError for |1,1> when P11 <= 1e-12 (|J| = 1 at t^2 = 1/2). The
/// |2,0> weights are reported at t r = 0 too, as the limit of the t-independent formula.
EntanglementReport schmidt_analytic(double J_abs, const BeamSplitter& bs, Outcome outcome);

/// -sum l^2 log2 l^2 over Schmidt coefficients l (not squared), with 0 log 0 = 0.
/// Throws NormalizationError unless sum l^2 = 1 within 1e-6.
double von_neumann_entropy(std::span<const double> coefficients);

enum class SvdMethod {
  Auto,           // rank-revealing, falling back to Dense if the rank cap is hit
  RankRevealing,  // pivoted Gram-Schmidt on rows, then a thin SVD of the coefficients
  Dense,          // full divide-and-conquer SVD of the weighted matrix
};

struct SchmidtOptions {
  double truncation = 1e-8;  // drop coefficients below this
  SvdMethod method = SvdMethod::Auto;
  std::size_t max_rank = 32;
};

struct SchmidtDecomposition {
  std::vector<double> coefficients;      // descending, above truncation
  std::vector<TemporalShape> modes_a;    // tau_1 axis, Sampled on `grid`
  std::vector<TemporalShape> modes_b;    // tau_2 axis
  TimeGrid grid;
  double discarded_bound;                // Frobenius norm of everything not factored; >= next singular value

  double entropy() const { return von_neumann_entropy(coefficients); }
  std::vector<double> weights() const;   // coefficients squared
};

/// Numerical Schmidt decomposition of F via the SVD of sqrt(w_i) F_ij sqrt(w_j), w the
/// trapezoid weights. Singular values are the continuum Schmidt coefficients; modes are
/// unit-norm under the same quadrature. Each mode_a is phased so its largest-magnitude
/// sample is real positive, with mode_b counter-rotated.
SchmidtDecomposition schmidt_numeric(const TwoPhotonAmplitude& amp, const SchmidtOptions& options = {});

/// Overlaps <f_i | phi_k> between the inputs (rows: f1, f2) and the tau_1 Schmidt modes.
/// Exposes the basis dependence of the |2,0> entropy when J = 0.
Eigen::MatrixXcd mode_overlaps(const SchmidtDecomposition& decomposition, const TemporalShape& f1,
                               const TemporalShape& f2);

struct Range {
  double lo;
  double hi;
};

struct SurfaceCell {
  double J_abs;
  double t_sq;
  std::optional<double> entropy;  // empty where the outcome is degenerate
};

/// Analytic entropy on a (J_abs x t_sq) lattice, J_abs-major. Endpoints included.
std::vector<SurfaceCell> entropy_surface(Outcome outcome, Range J_range, Range t_sq_range,
                                         std::size_t J_points, std::size_t t_points);

/// Header `J_abs,t_sq,outcome,entropy`; degenerate cells have an empty entropy field.
void write_surface_csv(std::span<const SurfaceCell> cells, Outcome outcome, std::ostream& out);

}  // namespace biphoton
