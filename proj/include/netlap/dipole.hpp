#pragma once

// Dipoles v_x (Δv_x = δ_x - δ_o), the Gram matrix M_F and the
// reproducing-kernel identities of the energy space.

#include <iosfwd>
#include <utility>
#include <vector>

#include "netlap/network.hpp"

namespace netlap {

/// Reduced systems up to this dimension are factored with dense Cholesky;
/// larger ones use Jacobi-preconditioned conjugate gradients.
inline constexpr Index kDenseSolverLimit = 2048;

/// Laplacian with the row and column of `origin` deleted. Strictly positive
/// definite on a connected network.
Eigen::MatrixXd reduced_laplacian(const ResistanceNetwork& net, Index origin);

/// Solver for Δv = f with v(o) = 0 on a finite connected network.
class DipoleSolver {
 public:
  DipoleSolver(const ResistanceNetwork& net, Index origin, Index dense_limit = kDenseSolverLimit);

  /// v_x, the dipole at x, extended by 0 at the origin.
  EnergyVector solve(Index x) const;
  /// Columns v_x for x in `targets`.
  Eigen::MatrixXd solve_all(const std::vector<Index>& targets) const;

  bool uses_dense_factorization() const { return dense_; }
  Index origin() const { return origin_; }

 private:
  Eigen::VectorXd solve_reduced(const Eigen::VectorXd& rhs) const;

  Index size_;
  Index origin_;
  bool dense_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::SparseMatrix<double> sparse_;
};

EnergyVector solve_dipole(const ResistanceNetwork& net, Index origin, Index x);

/// The dipoles {v_x : x ∈ F}, each solved on the whole truncation.
struct DipoleFamily {
  Index origin = 0;
  std::vector<Index> index_set;
  /// n x |F|; column i is v_{index_set[i]}.
  Eigen::MatrixXd members;

  EnergyVector member(std::size_t i) const { return members.col(static_cast<Eigen::Index>(i)); }
  Index size() const { return index_set.size(); }
};

DipoleFamily dipole_family(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set);

struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<Index> index_order;
};

/// (M_F)_{xy} = E(v_x, v_y), assembled from energy pairings and symmetrized.
GramMatrix gram_matrix(const ResistanceNetwork& net, const DipoleFamily& dipoles);
GramMatrix gram_matrix(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set);

/// F = all vertices except the origin.
std::vector<Index> all_but(const ResistanceNetwork& net, Index origin);

/// R(o, x) = M_xx.
double effective_resistance(const ResistanceNetwork& net, Index origin, Index x);

/// Subtracts u(o) so the representative vanishes at the origin.
EnergyVector normalize_at_origin(const VertexFunction& u, Index origin);

/// |E(v_x, u) - (u(x) - u(o))|.
double reproducing_residual(const ResistanceNetwork& net, Index origin, Index x, const VertexFunction& u);

struct GreenIdentity {
  double value = 0.0;     // E(v_x, Δv_y)
  double expected = 0.0;  // δ_xy + 1
  double residual = 0.0;
};

GreenIdentity green_identity_residual(const ResistanceNetwork& net, Index origin, Index x, Index y);

struct SpanEnergy {
  double quadratic = 0.0;  // <u, Δu> for u = Σ ξ_x v_x
  double coefficient = 0.0;  // Σ|ξ_x|² + |Σ ξ_x|²
};

/// `xi` is indexed like `index_set`.
SpanEnergy span_energy(const ResistanceNetwork& net, Index origin, const std::vector<Index>& index_set,
                       const Eigen::VectorXd& xi);

/// max_{x ≠ o} |Δ_x M(x, y) - δ_xy| with M(·, y) taken from Gram entries.
double kernel_laplacian_residual(const ResistanceNetwork& net, Index origin, Index y);

void write_gram_csv(std::ostream& os, const ResistanceNetwork& net, const GramMatrix& gram);
void write_energy_vector_csv(std::ostream& os, const ResistanceNetwork& net, const EnergyVector& v);

}  // namespace netlap
