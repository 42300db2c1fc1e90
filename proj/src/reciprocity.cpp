#include "netlap/reciprocity.hpp"

#include <algorithm>
#include <cmath>

#include "extended.hpp"
#include "netlap/error.hpp"

namespace netlap {

namespace {

// Energy-orthogonal projection onto V(F) = span{v_x : x ∈ F}. The
// coefficients solve M_F α = (w(x) - w(o))_{x ∈ F}, by the reproducing
// property of the dipoles.
class SpanProjector {
 public:
  SpanProjector(const ResistanceNetwork& net, Index origin, const std::vector<Index>& index_set)
      : origin_(origin), index_set_(index_set), dipoles_(dipole_family(net, origin, index_set)) {
    llt_.compute(gram_matrix(net, dipoles_).entries);
    if (llt_.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "Gram matrix is singular");
  }

  VertexFunction project(const VertexFunction& w) const {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(index_set_.size()));
    for (std::size_t i = 0; i < index_set_.size(); ++i) {
      rhs(static_cast<Eigen::Index>(i)) =
          w(static_cast<Eigen::Index>(index_set_[i])) - w(static_cast<Eigen::Index>(origin_));
    }
    return dipoles_.members * llt_.solve(rhs);
  }

 private:
  Index origin_;
  std::vector<Index> index_set_;
  DipoleFamily dipoles_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

double energy_norm(const ResistanceNetwork& net, const VertexFunction& u) {
  return std::sqrt(std::max(0.0, energy(net, u, u)));
}

}  // namespace

EigenSystem diagonalize_gram(const GramMatrix& gram, double tolerance) {
  const Eigen::MatrixXd& m = gram.entries;
  if (m.rows() == 0 || m.rows() != m.cols()) throw Error(ErrorCode::EmptyIndexSet, "Gram matrix is empty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tolerance * scale) {
    throw Error(ErrorCode::NotPositiveDefinite, "Gram matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigensolver failed");
  EigenSystem out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  out.index_order = gram.index_order;
  if (out.eigenvalues(0) <= 0.0) {
    throw Error(ErrorCode::NotPositiveDefinite, "Gram matrix has a nonpositive eigenvalue");
  }
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    auto col = out.eigenvectors.col(j);
    const double cutoff = 1e-10 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > cutoff) {
        if (col(i) < 0.0) col *= -1.0;
        break;
      }
    }
  }
  return out;
}

double expectation(const Eigen::VectorXd& xi) { return xi.sum(); }

OnbFamily build_onb(const EigenSystem& eigen, const DipoleFamily& dipoles) {
  if (eigen.index_order != dipoles.index_set) {
    throw Error(ErrorCode::IndexMismatch, "eigen system and dipole family use different index orders");
  }
  OnbFamily onb;
  onb.eigenvalues = eigen.eigenvalues;
  onb.members = dipoles.members * eigen.eigenvectors * eigen.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  return onb;
}

Eigen::VectorXd project_delta_o(const EigenSystem& eigen) {
  const auto j = eigen.eigenvalues.size();
  Eigen::VectorXd c(j);
  for (Eigen::Index i = 0; i < j; ++i) {
    c(i) = -expectation(eigen.eigenvectors.col(i)) / std::sqrt(eigen.eigenvalues(i));
  }
  return c;
}

CompressionMatrix compression_matrix(const EigenSystem& eigen) {
  const auto j = eigen.eigenvalues.size();
  Eigen::VectorXd g(j);
  for (Eigen::Index i = 0; i < j; ++i) {
    g(i) = expectation(eigen.eigenvectors.col(i)) / std::sqrt(eigen.eigenvalues(i));
  }
  CompressionMatrix out;
  out.entries = g * g.transpose();
  out.entries.diagonal() += eigen.eigenvalues.cwiseInverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.entries, Eigen::EigenvaluesOnly);
  out.spectrum = solver.eigenvalues();
  return out;
}

ReciprocityReport verify_reciprocity(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set) {
  // Entries of T_F scale like 1/λ_min, so the pipeline runs in extended
  // precision and only the report is rounded to double.
  using detail::MatrixX;
  using detail::VectorX;
  using Real = detail::RealX;

  dipole_family(net, origin, index_set);  // validates F
  const auto j = static_cast<Eigen::Index>(index_set.size());
  const MatrixX dipoles = detail::extended_dipoles(net, origin, index_set);
  auto pairing = [&](const MatrixX& a, const MatrixX& b) { return detail::extended_pairing(net, a, b); };

  MatrixX gram = pairing(dipoles, dipoles);
  gram = (Real(0.5) * (gram + gram.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixX> solver(gram);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigensolver failed");
  const VectorX lambda = solver.eigenvalues();
  if (lambda(0) <= 0) throw Error(ErrorCode::NotPositiveDefinite, "Gram matrix has a nonpositive eigenvalue");
  const MatrixX xi = solver.eigenvectors();

  const VectorX inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  const MatrixX onb = dipoles * xi * inv_sqrt.asDiagonal();
  const MatrixX compressed = pairing(onb, detail::extended_laplacian(net, onb));
  const VectorX g = (xi.colwise().sum().transpose().array() * inv_sqrt.array()).matrix();
  MatrixX predicted = g * g.transpose();
  predicted.diagonal() += lambda.cwiseInverse();
  const MatrixX gram_u = pairing(onb, onb);

  ReciprocityReport report;
  report.compressed = compressed.cast<double>();
  report.predicted = predicted.cast<double>();
  report.residual = static_cast<double>((compressed - predicted).cwiseAbs().maxCoeff());
  report.orthonormality = static_cast<double>((gram_u - MatrixX::Identity(j, j)).cwiseAbs().maxCoeff());
  return report;
}

double expectation_identity_residual(const EigenSystem& eigen) {
  const auto j = eigen.eigenvalues.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < j; ++i) {
    const double e = expectation(eigen.eigenvectors.col(i));
    sum += e * e;
  }
  return std::abs(sum / static_cast<double>(j) - 1.0);
}

ProjectionNormBounds projection_norm_bounds(const EigenSystem& eigen) {
  const auto j = static_cast<double>(eigen.eigenvalues.size());
  ProjectionNormBounds out;
  out.lower = j / eigen.eigenvalues.maxCoeff();
  out.upper = j / eigen.eigenvalues.minCoeff();
  out.value = project_delta_o(eigen).squaredNorm();
  return out;
}

SpectralMeasure spectral_measure(const CompressionMatrix& compression, Index exhaustion_index) {
  SpectralMeasure mu;
  mu.exhaustion_index = exhaustion_index;
  const auto j = compression.spectrum.size();
  for (Eigen::Index i = 0; i < j; ++i) {
    mu.atoms.push_back({compression.spectrum(i), 1.0 / static_cast<double>(j)});
  }
  return mu;
}

double kolmogorov_distance(const SpectralMeasure& a, const SpectralMeasure& b) {
  std::vector<double> points;
  for (const auto& atom : a.atoms) points.push_back(atom.sigma);
  for (const auto& atom : b.atoms) points.push_back(atom.sigma);
  std::sort(points.begin(), points.end());
  auto cdf = [](const SpectralMeasure& mu, double x) {
    double mass = 0.0;
    for (const auto& atom : mu.atoms) {
      if (atom.sigma <= x) mass += atom.weight;
    }
    return mass;
  };
  double worst = 0.0;
  for (double x : points) worst = std::max(worst, std::abs(cdf(a, x) - cdf(b, x)));
  return worst;
}

std::vector<SpectralMeasure> exhaustion_measures(const ResistanceNetwork& net, Index origin,
                                                 const Exhaustion& exhaustion) {
  if (exhaustion.max_vertex() >= net.size()) {
    throw Error(ErrorCode::TruncationTooSmall, "exhaustion reaches beyond the truncation");
  }
  std::vector<SpectralMeasure> out;
  out.reserve(exhaustion.count());
  for (Index k = 0; k < exhaustion.count(); ++k) {
    const EigenSystem eigen = diagonalize_gram(gram_matrix(net, origin, exhaustion[k]));
    out.push_back(spectral_measure(compression_matrix(eigen), k + 1));
  }
  return out;
}

std::vector<SweepPoint> measure_convergence_sweep(const ResistanceNetwork& net, Index origin,
                                                  const Exhaustion& exhaustion) {
  const auto measures = exhaustion_measures(net, origin, exhaustion);
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k + 1 < measures.size(); ++k) {
    out.push_back({measures[k].exhaustion_index, kolmogorov_distance(measures[k], measures[k + 1])});
  }
  return out;
}

std::vector<CompressionLimitPoint> compression_limit_residual(const ResistanceNetwork& net, Index origin,
                                                              const Exhaustion& exhaustion,
                                                              const std::vector<Index>& support,
                                                              const Eigen::VectorXd& coefficients) {
  if (static_cast<Index>(coefficients.size()) != support.size()) {
    throw Error(ErrorCode::IndexMismatch, "coefficient vector does not match the support");
  }
  if (exhaustion.max_vertex() >= net.size()) {
    throw Error(ErrorCode::TruncationTooSmall, "exhaustion reaches beyond the truncation");
  }
  const auto& first = exhaustion[0];
  for (Index x : support) {
    if (!std::binary_search(first.begin(), first.end(), x)) {
      throw Error(ErrorCode::UnsupportedTestVector, "test vector uses a dipole outside F_1");
    }
  }
  const VertexFunction f = dipole_family(net, origin, support).members * coefficients;
  const VertexFunction lap_f = apply_laplacian(net, f).values;

  std::vector<CompressionLimitPoint> out;
  for (Index k = 0; k < exhaustion.count(); ++k) {
    const SpanProjector projector(net, origin, exhaustion[k]);
    const VertexFunction compressed = projector.project(apply_laplacian(net, projector.project(f)).values);
    CompressionLimitPoint point;
    point.k = k + 1;
    point.identity_residual = energy_norm(net, compressed - projector.project(lap_f));
    point.limit_residual = energy_norm(net, compressed - lap_f);
    out.push_back(point);
  }
  return out;
}

IntertwiningResidual balanced_intertwining_residual(const ResistanceNetwork& net, Index origin,
                                                    const std::vector<Index>& index_set, const Eigen::VectorXd& xi,
                                                    double tolerance) {
  if (static_cast<Index>(xi.size()) != index_set.size()) {
    throw Error(ErrorCode::IndexMismatch, "coefficient vector does not match the index set");
  }
  if (std::abs(xi.sum()) > tolerance * std::max(1.0, xi.lpNorm<1>())) {
    throw Error(ErrorCode::NotBalanced, "coefficients do not sum to zero");
  }
  dipole_family(net, origin, index_set);  // validates F
  const detail::MatrixX dipoles = detail::extended_dipoles(net, origin, index_set);
  const detail::VectorX coeffs = xi.cast<detail::RealX>();
  const detail::MatrixX phi_xi = dipoles * coeffs;
  const auto quad_lap = static_cast<double>(detail::extended_pairing(net, phi_xi, detail::extended_laplacian(net, phi_xi))(0, 0));
  const auto norm_phi = static_cast<double>(detail::extended_pairing(net, phi_xi, phi_xi)(0, 0));
  const detail::MatrixX gram = detail::extended_pairing(net, dipoles, dipoles);
  const auto quad_gram = static_cast<double>(coeffs.dot(gram * coeffs));
  IntertwiningResidual out;
  out.laplacian = std::abs(quad_lap - xi.squaredNorm());
  out.gram = std::abs(quad_gram - norm_phi);
  if (xi.squaredNorm() > 0.0) {
    const double lhs = quad_lap / norm_phi;
    const double rhs = xi.squaredNorm() / quad_gram;
    out.ratio = std::abs(lhs - rhs) / std::abs(rhs);
  }
  return out;
}

SpectralGap spectral_gap_estimate(const GramMatrix& gram) {
  const Eigen::MatrixXd& m = gram.entries;
  const auto j = m.rows();
  if (j == 0) throw Error(ErrorCode::EmptyIndexSet, "index set F is empty");
  SpectralGap out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m, Eigen::EigenvaluesOnly);
  out.inverse_norm = 1.0 / full.eigenvalues().maxCoeff();
  if (j == 1) return out;
  // Orthonormal basis of the balanced subspace {ξ : Σ ξ = 0}.
  const Eigen::MatrixXd q = Eigen::VectorXd::Ones(j).householderQr().householderQ();
  const Eigen::MatrixXd basis = q.rightCols(j - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> balanced(basis.transpose() * m * basis, Eigen::EigenvaluesOnly);
  out.alpha = 1.0 / balanced.eigenvalues().maxCoeff();
  return out;
}

SpectralGap spectral_gap_estimate(const ResistanceNetwork& net, Index origin, std::vector<Index> index_set) {
  return spectral_gap_estimate(gram_matrix(net, origin, std::move(index_set)));
}

}  // namespace netlap
