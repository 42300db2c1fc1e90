#pragma once

// Diagonalization of M_F, the orthonormal family u_λ, the compression
// T_F = D_F^{-1} + g g* and the spectral measures μ_F built from it.

#include <limits>
#include <vector>

#include "netlap/dipole.hpp"

namespace netlap {

/// Orthonormal eigenpairs of M_F, eigenvalues ascending. Each eigenvector
/// has its first non-negligible component positive.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column j pairs with eigenvalues(j)
  std::vector<Index> index_order;

  Index dimension() const { return static_cast<Index>(eigenvalues.size()); }
};

EigenSystem diagonalize_gram(const GramMatrix& gram, double tolerance = kDefaultTolerance);

/// E(ξ) = Σ_x ξ(x).
double expectation(const Eigen::VectorXd& xi);

/// u_λ = λ^{-1/2} Σ_x ξ_λ(x) v_x, as columns.
struct OnbFamily {
  Eigen::MatrixXd members;
  Eigen::VectorXd eigenvalues;
};

OnbFamily build_onb(const EigenSystem& eigen, const DipoleFamily& dipoles);

/// c_λ = -E(ξ_λ)/√λ, the coordinates of P_F δ_o in the basis u_λ.
Eigen::VectorXd project_delta_o(const EigenSystem& eigen);

struct CompressionMatrix {
  Eigen::MatrixXd entries;
  Eigen::VectorXd spectrum;  // ascending
};

/// τ_jk = δ_jk/λ_j + E(ξ_j) E(ξ_k)/√(λ_j λ_k).
CompressionMatrix compression_matrix(const EigenSystem& eigen);

struct ReciprocityReport {
  Eigen::MatrixXd compressed;   // [E(u_λ, Δu_κ)] from energy pairings
  Eigen::MatrixXd predicted;    // D_F^{-1} + g g*
  double residual = 0.0;        // max-norm difference
  double orthonormality = 0.0;  // ‖[E(u_j, u_k)] - I‖_max
};

ReciprocityReport verify_reciprocity(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set);

/// |(1/J) Σ |E(ξ_j)|² - 1|.
double expectation_identity_residual(const EigenSystem& eigen);

struct ProjectionNormBounds {
  double lower = 0.0;  // J / λ_max
  double value = 0.0;  // Σ |E(ξ_j)|² / λ_j = ‖P_F δ_o‖²
  double upper = 0.0;  // J / λ_min
};

ProjectionNormBounds projection_norm_bounds(const EigenSystem& eigen);

struct Atom {
  double sigma = 0.0;
  double weight = 0.0;
};

struct SpectralMeasure {
  std::vector<Atom> atoms;
  Index exhaustion_index = 0;
};

/// μ_F = (1/J) Σ δ_{σ_j} over the spectrum of T_F.
SpectralMeasure spectral_measure(const CompressionMatrix& compression, Index exhaustion_index = 0);

/// sup_x |F_a(x) - F_b(x)| between the distribution functions.
double kolmogorov_distance(const SpectralMeasure& a, const SpectralMeasure& b);

/// μ_{F_k} for every set of the exhaustion, on one fixed truncation.
std::vector<SpectralMeasure> exhaustion_measures(const ResistanceNetwork& net, Index origin,
                                                 const Exhaustion& exhaustion);

struct SweepPoint {
  Index k = 0;
  double distance = 0.0;  // between μ_{F_k} and μ_{F_{k+1}}
};

std::vector<SweepPoint> measure_convergence_sweep(const ResistanceNetwork& net, Index origin,
                                                  const Exhaustion& exhaustion);

struct CompressionLimitPoint {
  Index k = 0;
  /// ‖P_F Δ P_F f - P_F Δ f‖, zero for every k since P_F f = f.
  double identity_residual = 0.0;
  /// ‖P_F Δ P_F f - Δ f‖, decreasing to zero along the exhaustion.
  double limit_residual = 0.0;
};

/// f = Σ coefficients[i] v_{support[i]}; the support must lie in F_1.
std::vector<CompressionLimitPoint> compression_limit_residual(const ResistanceNetwork& net, Index origin,
                                                              const Exhaustion& exhaustion,
                                                              const std::vector<Index>& support,
                                                              const Eigen::VectorXd& coefficients);

struct IntertwiningResidual {
  double laplacian = 0.0;  // |E(Φξ, ΔΦξ) - ‖ξ‖²|
  double gram = 0.0;       // |<ξ, Mξ> - E(Φξ, Φξ)|
  double ratio = 0.0;      // relative mismatch of the two Rayleigh quotients
};

/// ξ indexed like `index_set`; Σ ξ must vanish.
IntertwiningResidual balanced_intertwining_residual(const ResistanceNetwork& net, Index origin,
                                                    const std::vector<Index>& index_set, const Eigen::VectorXd& xi,
                                                    double tolerance = kDefaultTolerance);

struct SpectralGap {
  /// min over balanced ξ ≠ 0 of ‖ξ‖²/<ξ, M_F ξ>; +inf when |F| = 1.
  double alpha = std::numeric_limits<double>::infinity();
  double inverse_norm = 0.0;  // 1/‖M_F‖
};

SpectralGap spectral_gap_estimate(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set);
SpectralGap spectral_gap_estimate(const GramMatrix& gram);

}  // namespace netlap
