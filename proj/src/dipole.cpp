#include "netlap/dipole.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "extended.hpp"
#include "netlap/error.hpp"
#include "netlap/format.hpp"

namespace netlap {

namespace {

Eigen::Index reduced_index(Index x, Index origin) {
  return static_cast<Eigen::Index>(x < origin ? x : x - 1);
}

void check_index_set(const ResistanceNetwork& net, Index origin, const std::vector<Index>& set) {
  if (set.empty()) throw Error(ErrorCode::EmptyIndexSet, "index set F is empty");
  for (Index x : set) {
    if (x >= net.size()) throw Error(ErrorCode::TruncationTooSmall, "index set leaves the truncation");
    if (x == origin) throw Error(ErrorCode::OriginDipole, "index set contains the origin");
  }
}

}  // namespace

Eigen::MatrixXd reduced_laplacian(const ResistanceNetwork& net, Index origin) {
  if (origin >= net.size()) throw Error(ErrorCode::InvalidParameter, "origin is not a vertex");
  const Eigen::MatrixXd full = net.laplacian_matrix();
  const auto n = static_cast<Eigen::Index>(net.size());
  const auto o = static_cast<Eigen::Index>(origin);
  Eigen::MatrixXd reduced(n - 1, n - 1);
  for (Eigen::Index i = 0, ri = 0; i < n; ++i) {
    if (i == o) continue;
    for (Eigen::Index j = 0, rj = 0; j < n; ++j) {
      if (j == o) continue;
      reduced(ri, rj++) = full(i, j);
    }
    ++ri;
  }
  return reduced;
}

DipoleSolver::DipoleSolver(const ResistanceNetwork& net, Index origin, Index dense_limit)
    : size_(net.size()), origin_(origin), dense_(net.size() - 1 <= dense_limit) {
  if (origin >= net.size()) throw Error(ErrorCode::InvalidParameter, "origin is not a vertex");
  if (dense_) {
    llt_.compute(reduced_laplacian(net, origin));
    if (llt_.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularSystem, "reduced Laplacian is not positive definite");
    }
  } else {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index x = 0; x < net.size(); ++x) {
      if (x == origin) continue;
      const auto rx = reduced_index(x, origin);
      triplets.emplace_back(rx, rx, net.total_conductance(x));
      for (const auto& nb : net.neighbors(x)) {
        if (nb.vertex != origin) triplets.emplace_back(rx, reduced_index(nb.vertex, origin), -nb.c);
      }
    }
    const auto m = static_cast<Eigen::Index>(net.size() - 1);
    sparse_.resize(m, m);
    sparse_.setFromTriplets(triplets.begin(), triplets.end());
  }
}

Eigen::VectorXd DipoleSolver::solve_reduced(const Eigen::VectorXd& rhs) const {
  if (dense_) return llt_.solve(rhs);
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-14);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * rhs.size()));
  cg.compute(sparse_);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "conjugate gradients did not converge");
  }
  return x;
}

EnergyVector DipoleSolver::solve(Index x) const {
  if (x == origin_) throw Error(ErrorCode::OriginDipole, "dipole requested at the origin");
  if (x >= size_) throw Error(ErrorCode::InvalidParameter, "vertex out of range");
  const auto m = static_cast<Eigen::Index>(size_ - 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(reduced_index(x, origin_)) = 1.0;
  const Eigen::VectorXd reduced = solve_reduced(rhs);
  EnergyVector v(m + 1);
  for (Index y = 0; y < size_; ++y) {
    v(static_cast<Eigen::Index>(y)) = y == origin_ ? 0.0 : reduced(reduced_index(y, origin_));
  }
  return v;
}

Eigen::MatrixXd DipoleSolver::solve_all(const std::vector<Index>& targets) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = solve(targets[i]);
  return out;
}

EnergyVector solve_dipole(const ResistanceNetwork& net, Index origin, Index x) {
  if (x == origin) throw Error(ErrorCode::OriginDipole, "dipole requested at the origin");
  return DipoleSolver(net, origin).solve(x);
}

DipoleFamily dipole_family(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set) {
  check_index_set(net, origin, index_set);
  DipoleFamily family;
  family.origin = origin;
  family.members = DipoleSolver(net, origin).solve_all(index_set);
  family.index_set = std::move(index_set);
  return family;
}

GramMatrix gram_matrix(const ResistanceNetwork& net, const DipoleFamily& dipoles) {
  if (dipoles.index_set.empty()) throw Error(ErrorCode::EmptyIndexSet, "index set F is empty");
  GramMatrix gram;
  const Eigen::MatrixXd raw = energy_gram(net, dipoles.members, dipoles.members);
  gram.entries = 0.5 * (raw + raw.transpose());
  gram.index_order = dipoles.index_set;
  return gram;
}

GramMatrix gram_matrix(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set) {
  if (index_set.empty()) throw Error(ErrorCode::EmptyIndexSet, "index set F is empty");
  return gram_matrix(net, dipole_family(net, origin, std::move(index_set)));
}

std::vector<Index> all_but(const ResistanceNetwork& net, Index origin) {
  std::vector<Index> out;
  for (Index x = 0; x < net.size(); ++x) {
    if (x != origin) out.push_back(x);
  }
  return out;
}

double effective_resistance(const ResistanceNetwork& net, Index origin, Index x) {
  const EnergyVector v = solve_dipole(net, origin, x);
  return energy(net, v, v);
}

EnergyVector normalize_at_origin(const VertexFunction& u, Index origin) {
  return (u.array() - u(static_cast<Eigen::Index>(origin))).matrix();
}

double reproducing_residual(const ResistanceNetwork& net, Index origin, Index x, const VertexFunction& u) {
  require_defined(net, u);
  const EnergyVector v = solve_dipole(net, origin, x);
  const double expected = u(static_cast<Eigen::Index>(x)) - u(static_cast<Eigen::Index>(origin));
  return std::abs(energy(net, v, u) - expected);
}

GreenIdentity green_identity_residual(const ResistanceNetwork& net, Index origin, Index x, Index y) {
  DipoleSolver solver(net, origin);
  const EnergyVector vx = solver.solve(x);
  const EnergyVector vy = solver.solve(y);
  const VertexFunction lap_vy = apply_laplacian(net, vy).values;
  GreenIdentity out;
  out.value = energy(net, vx, lap_vy);
  out.expected = (x == y ? 1.0 : 0.0) + 1.0;
  out.residual = std::abs(out.value - out.expected);
  return out;
}

SpanEnergy span_energy(const ResistanceNetwork& net, Index origin, const std::vector<Index>& index_set,
                       const Eigen::VectorXd& xi) {
  if (static_cast<Index>(xi.size()) != index_set.size()) {
    throw Error(ErrorCode::IndexMismatch, "coefficient vector does not match the index set");
  }
  if (origin >= net.size()) throw Error(ErrorCode::InvalidParameter, "origin is not a vertex");
  check_index_set(net, origin, index_set);
  // Δ multiplies dipole roundoff by the conductances, so this runs in long double.
  const detail::MatrixX u = detail::extended_dipoles(net, origin, index_set) * xi.cast<detail::RealX>();
  SpanEnergy out;
  out.quadratic = static_cast<double>(detail::extended_pairing(net, u, detail::extended_laplacian(net, u))(0, 0));
  const double total = xi.sum();
  out.coefficient = xi.squaredNorm() + total * total;
  return out;
}

double kernel_laplacian_residual(const ResistanceNetwork& net, Index origin, Index y) {
  if (y == origin) throw Error(ErrorCode::OriginDipole, "kernel column requested at the origin");
  const std::vector<Index> others = all_but(net, origin);
  const GramMatrix gram = gram_matrix(net, origin, others);
  const auto col = static_cast<Eigen::Index>(std::find(others.begin(), others.end(), y) - others.begin());
  VertexFunction phi = VertexFunction::Zero(static_cast<Eigen::Index>(net.size()));
  for (std::size_t i = 0; i < others.size(); ++i) {
    phi(static_cast<Eigen::Index>(others[i])) = gram.entries(static_cast<Eigen::Index>(i), col);
  }
  const VertexFunction lap = apply_laplacian(net, phi).values;
  double worst = 0.0;
  for (Index x : others) worst = std::max(worst, std::abs(lap(static_cast<Eigen::Index>(x)) - (x == y ? 1.0 : 0.0)));
  return worst;
}

void write_gram_csv(std::ostream& os, const ResistanceNetwork& net, const GramMatrix& gram) {
  os << "vertex";
  for (Index x : gram.index_order) os << ',' << net.label(x);
  os << '\n';
  for (std::size_t i = 0; i < gram.index_order.size(); ++i) {
    os << net.label(gram.index_order[i]);
    for (std::size_t j = 0; j < gram.index_order.size(); ++j) {
      os << ',' << format_double(gram.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    os << '\n';
  }
}

void write_energy_vector_csv(std::ostream& os, const ResistanceNetwork& net, const EnergyVector& v) {
  os << "vertex,value\n";
  for (Index x = 0; x < net.size(); ++x) os << net.label(x) << ',' << format_double(v(static_cast<Eigen::Index>(x))) << '\n';
}

}  // namespace netlap
