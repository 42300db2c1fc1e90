#pragma once

// Heat kernels on finite truncations, semigroup residuals, stochastic mass
// along an exhaustion, and the valency / band / off-diagonal criteria.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netlap/network.hpp"

namespace netlap {

enum class TruncationMode {
  Full,               // Neumann Laplacian of the finite network, rows sum to 0
  DirichletInterior,  // principal submatrix on F, edges leaving F kept on the diagonal
};

struct HeatKernelSlice {
  double t = 0.0;
  std::vector<Index> vertices;
  Eigen::MatrixXd kernel;
  TruncationMode mode = TruncationMode::Full;
};

struct KernelDiagnostics {
  double symmetry = 0.0;   // ‖p - pᵀ‖_max
  double min_entry = 0.0;
  double max_row_sum = 0.0;
  double min_row_sum = 0.0;
};

KernelDiagnostics inspect_kernel(const HeatKernelSlice& slice);

/// S_t = e^{-tΔ_F} from one symmetric eigendecomposition, shared by every t.
class HeatSemigroup {
 public:
  /// Empty `vertices` means every vertex of the network.
  explicit HeatSemigroup(const ResistanceNetwork& net, TruncationMode mode = TruncationMode::Full,
                         std::vector<Index> vertices = {});
  /// Any symmetric generator; `vertices` only labels its rows.
  HeatSemigroup(const Eigen::MatrixXd& generator, std::vector<Index> vertices, TruncationMode mode);

  HeatKernelSlice kernel(double t) const;
  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const;
  /// (u - S_h u)/h, computed with expm1 so small h does not cancel.
  Eigen::VectorXd difference_quotient(double h, const Eigen::VectorXd& u) const;

  const Eigen::MatrixXd& generator() const { return generator_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const std::vector<Index>& vertices() const { return vertices_; }
  Index dimension() const { return static_cast<Index>(vertices_.size()); }
  TruncationMode mode() const { return mode_; }

 private:
  void decompose();

  Eigen::MatrixXd generator_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  std::vector<Index> vertices_;
  TruncationMode mode_;
};

/// Generator of the truncation: Neumann Laplacian or Dirichlet principal submatrix.
Eigen::MatrixXd truncated_laplacian(const ResistanceNetwork& net, const std::vector<Index>& vertices,
                                    TruncationMode mode);

HeatKernelSlice heat_kernel(const ResistanceNetwork& net, double t, TruncationMode mode = TruncationMode::Full,
                            std::vector<Index> vertices = {});

struct SemigroupResiduals {
  double composition = 0.0;   // ‖p_s p_t - p_{s+t}‖_max
  double contraction = 0.0;   // max(0, ‖S_t u‖ - ‖u‖)
  double continuity = 0.0;    // ‖u - S_t u‖
  double generator = 0.0;     // ‖(u - S_t u)/t - Δu‖, 0 at t = 0
};

SemigroupResiduals semigroup_checks(const HeatSemigroup& semigroup, double s, double t, const Eigen::VectorXd& u);

/// generator residual at h/2 divided by the one at h; close to 1/2 for a
/// first-order error.
double generator_halving_ratio(const HeatSemigroup& semigroup, double h, const Eigen::VectorXd& u);

struct MassSequence {
  std::vector<Index> k;
  std::vector<double> mass;  // Σ_y p_t^{(k)}(x, y)
  double estimate = 0.0;     // last mass
  bool monotone = true;      // nondecreasing within tolerance
  double max_excess = 0.0;   // max(0, mass - 1)
};

/// Dirichlet masses on each F_k of the exhaustion; sets must lie in `net`.
MassSequence stochastic_mass(const ResistanceNetwork& net, const Exhaustion& exhaustion, double t, Index x,
                             double tolerance = 1e-12);
/// Same with F_k = {0..k}, k = k_min..k_max, on a generated member of the family.
MassSequence stochastic_mass(const FamilySpec& family, Index k_min, Index k_max, double t, Index x,
                             double tolerance = 1e-12);

enum class TrendVerdict { CriterionMet, Inconclusive };

std::string verdict_name(TrendVerdict verdict);

/// Numerical evidence that Σ terms diverges: over the last half of the
/// sequence the log-log slope of the terms must be at least -1.
TrendVerdict classify_divergence(const std::vector<double>& terms);

struct WojciechowskiReport {
  std::vector<Index> radii;
  std::vector<double> valency;              // m(r) on symmetric trees, M(r) otherwise
  std::vector<double> partial_sums;         // Σ_{ρ<=r} 1/valency
  bool spherically_symmetric = false;
  TrendVerdict verdict = TrendVerdict::Inconclusive;
};

/// Valencies count incident edges regardless of weight. The last sphere of a
/// finite truncation is dropped since its valencies are cut off.
WojciechowskiReport wojciechowski_criterion(const ResistanceNetwork& net, Index x0, Index r_max);
/// Sum over a prescribed valency profile m(0), m(1), ...
WojciechowskiReport wojciechowski_criterion(const std::vector<double>& valency_profile);

struct BandProfile {
  std::vector<Index> per_row_nonzeros;
  std::optional<Index> uniform_band;  // absent when some row is full
};

BandProfile band_profile(const Eigen::MatrixXd& matrix);
BandProfile band_profile(const MatrixLaplacianView& view);

struct GrowthReport {
  std::vector<Index> k;
  std::vector<double> norms;         // ‖P_k^⊥ A P_k‖
  std::vector<double> partial_sums;  // Σ 1/norm
  TrendVerdict verdict = TrendVerdict::Inconclusive;
};

/// Spectral norm of A[∉F_k, F_k] for every k; every F_k must leave rows outside.
GrowthReport off_diagonal_growth(const Eigen::MatrixXd& matrix, const Exhaustion& exhaustion);
GrowthReport off_diagonal_growth(const MatrixLaplacianView& view, const Exhaustion& exhaustion);

void write_mass_csv(std::ostream& os, const MassSequence& masses);
void write_growth_json(std::ostream& os, const GrowthReport& report);
void write_kernel_csv(std::ostream& os, const ResistanceNetwork& net, const HeatKernelSlice& slice);

}  // namespace netlap
