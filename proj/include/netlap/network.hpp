#pragma once

// Resistance networks, matrix Laplacians and the energy form.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netlap/rational.hpp"

namespace netlap {

using Index = std::size_t;

template <typename Scalar>
using BasicVertexFunction = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense function on the vertices of a (truncated) network. A NaN entry
/// marks a vertex where the function is undefined.
using VertexFunction = BasicVertexFunction<double>;
using ComplexVertexFunction = BasicVertexFunction<std::complex<double>>;

/// Function on the vertices, normalized to vanish at the origin. This is
/// the representative used for classes of the energy space.
using EnergyVector = VertexFunction;

inline constexpr double kDefaultTolerance = 1e-10;

struct Edge {
  Index u = 0;
  Index v = 0;
  double c = 0.0;
};

enum class FamilyKind { GeometricHalfline, UnitPath, BinaryTree, Complete, RandomWeighted };

std::string_view family_name(FamilyKind kind);
std::optional<FamilyKind> family_from_name(std::string_view name);

/// Parameters of a generated family. `size` is the vertex count for the
/// path-like and dense families and the depth for binary trees.
struct FamilySpec {
  FamilyKind kind = FamilyKind::UnitPath;
  Index size = 2;
  ExactRational ratio = 2;  // geometric half-line only
  std::uint64_t seed = 0;   // random_weighted only

  bool is_half_line() const {
    return kind == FamilyKind::GeometricHalfline || kind == FamilyKind::UnitPath;
  }
};

struct Neighbor {
  Index vertex;
  double c;
};

/// Connected weighted graph with symmetric nonnegative conductances and a
/// distinguished origin. Immutable once built.
class ResistanceNetwork {
 public:
  /// Validates and symmetrizes `edges`. Vertices are 0..vertex_count-1;
  /// when vertex_count is 0 it is inferred from the largest index.
  static ResistanceNetwork build(std::span<const Edge> edges, Index origin, Index vertex_count = 0,
                                 std::vector<std::string> labels = {});

  Index size() const { return static_cast<Index>(neighbors_.size()); }
  Index origin() const { return origin_; }

  /// c_xy, zero when x and y are not adjacent.
  double conductance(Index x, Index y) const;
  /// c(x) = sum_y c_xy over edges present in the truncation.
  double total_conductance(Index x) const { return total_[x]; }
  const std::vector<Neighbor>& neighbors(Index x) const { return neighbors_[x]; }
  /// Canonical edge list with u < v, sorted.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Index x) const { return labels_[x]; }
  std::optional<Index> find_label(std::string_view label) const;

  const std::optional<FamilySpec>& family() const { return family_; }
  /// Exact conductance of each entry of edges(), when known.
  const std::optional<std::vector<ExactRational>>& exact_conductances() const { return exact_; }

  /// Conductance from x to family vertices that the truncation dropped.
  double external_conductance(Index x) const { return external_[x]; }
  bool is_truncation_boundary(Index x) const { return external_[x] > 0.0; }

  /// Same graph with another distinguished vertex.
  ResistanceNetwork with_origin(Index origin) const;

  /// Neumann Laplacian of the truncation: a_xx = c(x), a_xy = -c_xy.
  Eigen::MatrixXd laplacian_matrix() const;
  Eigen::SparseMatrix<double> sparse_laplacian() const;

 private:
  friend ResistanceNetwork generate(const FamilySpec& spec);
  friend ResistanceNetwork with_family(ResistanceNetwork net, const FamilySpec& spec);

  ResistanceNetwork() = default;

  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<double> total_;
  std::vector<double> external_;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  Index origin_ = 0;
  std::optional<FamilySpec> family_;
  std::optional<std::vector<ExactRational>> exact_;
};

inline ResistanceNetwork build_network(std::span<const Edge> edges, Index origin) {
  return ResistanceNetwork::build(edges, origin);
}

/// Deterministic truncation of an infinite (or finite) family. The
/// geometric half-line has edge k-1 -- k with conductance b^k.
ResistanceNetwork generate(const FamilySpec& spec);

/// Attaches family metadata (boundary conductances, exact weights) to a
/// network read from a file. Throws InvalidParameter if the graph does not
/// match the family.
ResistanceNetwork with_family(ResistanceNetwork net, const FamilySpec& spec);

/// Matrix presented as a (truncated) matrix Laplacian. For truncations of a
/// generated family, `outside_row_mass` holds the part of each row that lives
/// outside the truncation, so row sums are checked against the full row.
struct MatrixLaplacianView {
  Eigen::MatrixXd entries;
  Eigen::VectorXd outside_row_mass;
  std::optional<Index> band_width;

  static MatrixLaplacianView from_network(const ResistanceNetwork& net);
  static MatrixLaplacianView from_matrix(Eigen::MatrixXd entries);

  Index size() const { return static_cast<Index>(entries.rows()); }
};

enum class LaplacianCondition { Symmetry, OffDiagonalSign, RowSum, DiagonalSign };

struct Violation {
  LaplacianCondition condition;
  Index row;
  Index col;
  double value;
};

std::string_view condition_name(LaplacianCondition condition);

/// Empty iff the view satisfies symmetry, nonpositive off-diagonal entries
/// and zero row sums (and hence a nonnegative diagonal).
std::vector<Violation> validate_matrix_laplacian(const MatrixLaplacianView& a,
                                                 double tolerance = kDefaultTolerance);

/// Nested finite vertex sets F_1 ⊆ F_2 ⊆ ... . When `origin` is given no set
/// may contain it.
class Exhaustion {
 public:
  explicit Exhaustion(std::vector<std::vector<Index>> sets, std::optional<Index> origin = std::nullopt);

  /// F_k = {first, ..., last_k} for last_k = first+kmin-1 .. first+kmax-1.
  static Exhaustion intervals(Index first, Index kmin, Index kmax);

  const std::vector<std::vector<Index>>& sets() const { return sets_; }
  Index count() const { return sets_.size(); }
  const std::vector<Index>& operator[](Index k) const { return sets_[k]; }
  std::optional<Index> origin() const { return origin_; }
  /// True when the last set is all of the network minus the origin.
  bool union_covers(const ResistanceNetwork& net) const;
  Index max_vertex() const;

 private:
  std::vector<std::vector<Index>> sets_;
  std::optional<Index> origin_;
};

template <typename Scalar>
struct BasicLaplacianValues {
  BasicVertexFunction<Scalar> values;
  /// Vertices where the truncation dropped edges of the generated family;
  /// the value there differs from the Laplacian of the infinite network.
  std::vector<Index> boundary_inexact;
};

using LaplacianValues = BasicLaplacianValues<double>;

/// (Δu)(x) = sum_y c_xy (u(x) - u(y)) using the edges present.
template <typename Scalar>
BasicLaplacianValues<Scalar> apply_laplacian(const ResistanceNetwork& net,
                                             const BasicVertexFunction<Scalar>& u);

/// Sesquilinear energy ½ sum_{x,y} c_xy conj(u(x)-u(y)) (v(x)-v(y)).
template <typename Scalar>
Scalar energy(const ResistanceNetwork& net, const BasicVertexFunction<Scalar>& u,
              const BasicVertexFunction<Scalar>& v);

inline double energy(const ResistanceNetwork& net, const VertexFunction& u) { return energy(net, u, u); }

/// Energy Gram matrix [E(col_i, col_j)] of the columns of `columns`.
Eigen::MatrixXd energy_gram(const ResistanceNetwork& net, const Eigen::MatrixXd& lhs,
                            const Eigen::MatrixXd& rhs);

/// |<u, Δu>_{ℓ²} - E(u, u)|.
double dirichlet_identity_residual(const ResistanceNetwork& net, const VertexFunction& u);

/// det A(F_k) for every set of the exhaustion.
std::vector<double> principal_minor_check(const MatrixLaplacianView& a, const Exhaustion& exhaustion);

struct PathKernel {
  double k = 0.0;
  std::vector<Index> path;
};

/// k = (sum of resistances along a resistance-shortest path)^{1/2}, so that
/// |u(x) - u(y)| <= k E(u)^{1/2} for every u.
PathKernel path_kernel_constant(const ResistanceNetwork& net, Index x, Index y);

/// Throws MissingValue if u is not defined at every vertex.
template <typename Scalar>
void require_defined(const ResistanceNetwork& net, const BasicVertexFunction<Scalar>& u);

VertexFunction delta(Index n, Index x);

}  // namespace netlap
