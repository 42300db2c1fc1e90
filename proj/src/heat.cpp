#include "netlap/heat.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <json.hpp>

#include "netlap/error.hpp"
#include "netlap/format.hpp"

namespace netlap {

namespace {

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::NegativeTime, "time must be finite and >= 0");
}

std::vector<Index> all_vertices(Index n) {
  std::vector<Index> out(n);
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<double> running_reciprocal_sums(const std::vector<double>& values) {
  std::vector<double> sums;
  sums.reserve(values.size());
  double total = 0.0;
  for (double v : values) {
    total += v > 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity();
    sums.push_back(total);
  }
  return sums;
}

// Dirichlet mass Σ_y p_t(x, y) in extended precision; graded conductances
// such as b^k lose the small eigenvalues in double.
double dirichlet_mass(const Eigen::MatrixXd& generator, Eigen::Index x, double t) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixL lap = generator.cast<long double>();
  Eigen::SelfAdjointEigenSolver<MatrixL> solver(lap);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "eigendecomposition failed");
  const auto& vectors = solver.eigenvectors();
  const auto& values = solver.eigenvalues();
  long double mass = 0.0L;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    mass += std::exp(-static_cast<long double>(t) * values(j)) * vectors(x, j) * vectors.col(j).sum();
  }
  return static_cast<double>(mass);
}

}  // namespace

KernelDiagnostics inspect_kernel(const HeatKernelSlice& slice) {
  KernelDiagnostics d;
  const Eigen::MatrixXd& p = slice.kernel;
  if (p.size() == 0) return d;
  d.symmetry = (p - p.transpose()).cwiseAbs().maxCoeff();
  d.min_entry = p.minCoeff();
  const Eigen::VectorXd rows = p.rowwise().sum();
  d.max_row_sum = rows.maxCoeff();
  d.min_row_sum = rows.minCoeff();
  return d;
}

Eigen::MatrixXd truncated_laplacian(const ResistanceNetwork& net, const std::vector<Index>& vertices,
                                    TruncationMode mode) {
  for (Index x : vertices) {
    if (x >= net.size()) throw Error(ErrorCode::TruncationTooSmall, "vertex outside the truncation");
  }
  const Eigen::MatrixXd full = net.laplacian_matrix();
  const auto m = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = full(static_cast<Eigen::Index>(vertices[i]), static_cast<Eigen::Index>(vertices[j]));
    }
  }
  if (mode == TruncationMode::DirichletInterior) {
    for (Eigen::Index i = 0; i < m; ++i) out(i, i) += net.external_conductance(vertices[i]);
  } else if (static_cast<Index>(m) != net.size()) {
    // Neumann on a subset: drop the edges that leave it.
    out.diagonal() = -(out.rowwise().sum() - out.diagonal());
  }
  return out;
}

HeatSemigroup::HeatSemigroup(const ResistanceNetwork& net, TruncationMode mode, std::vector<Index> vertices)
    : vertices_(vertices.empty() ? all_vertices(net.size()) : std::move(vertices)), mode_(mode) {
  generator_ = truncated_laplacian(net, vertices_, mode_);
  decompose();
}

HeatSemigroup::HeatSemigroup(const Eigen::MatrixXd& generator, std::vector<Index> vertices, TruncationMode mode)
    : generator_(generator), vertices_(std::move(vertices)), mode_(mode) {
  if (generator_.rows() != generator_.cols() || static_cast<Index>(generator_.rows()) != vertices_.size()) {
    throw Error(ErrorCode::IndexMismatch, "generator size does not match the vertex list");
  }
  decompose();
}

void HeatSemigroup::decompose() {
  if ((generator_ - generator_.transpose()).cwiseAbs().maxCoeff() > kDefaultTolerance * std::max(1.0, generator_.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidParameter, "heat generator is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator_);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

HeatKernelSlice HeatSemigroup::kernel(double t) const {
  require_time(t);
  HeatKernelSlice slice;
  slice.t = t;
  slice.vertices = vertices_;
  slice.mode = mode_;
  const auto n = static_cast<Eigen::Index>(vertices_.size());
  if (t == 0.0) {
    slice.kernel = Eigen::MatrixXd::Identity(n, n);
    return slice;
  }
  const Eigen::VectorXd weights = (-t * eigenvalues_).array().exp().matrix();
  slice.kernel = eigenvectors_ * weights.asDiagonal() * eigenvectors_.transpose();
  slice.kernel = 0.5 * (slice.kernel + slice.kernel.transpose()).eval();
  return slice;
}

Eigen::VectorXd HeatSemigroup::apply(double t, const Eigen::VectorXd& u) const {
  require_time(t);
  if (u.size() != static_cast<Eigen::Index>(vertices_.size())) {
    throw Error(ErrorCode::IndexMismatch, "vector does not match the truncation");
  }
  if (t == 0.0) return u;
  const Eigen::VectorXd weights = (-t * eigenvalues_).array().exp().matrix();
  return eigenvectors_ * (weights.asDiagonal() * (eigenvectors_.transpose() * u));
}

Eigen::VectorXd HeatSemigroup::difference_quotient(double h, const Eigen::VectorXd& u) const {
  require_time(h);
  if (h == 0.0) throw Error(ErrorCode::InvalidParameter, "difference quotient needs h > 0");
  if (u.size() != static_cast<Eigen::Index>(vertices_.size())) {
    throw Error(ErrorCode::IndexMismatch, "vector does not match the truncation");
  }
  Eigen::VectorXd weights(eigenvalues_.size());
  for (Eigen::Index j = 0; j < weights.size(); ++j) weights(j) = -std::expm1(-h * eigenvalues_(j)) / h;
  return eigenvectors_ * (weights.asDiagonal() * (eigenvectors_.transpose() * u));
}

HeatKernelSlice heat_kernel(const ResistanceNetwork& net, double t, TruncationMode mode, std::vector<Index> vertices) {
  require_time(t);
  return HeatSemigroup(net, mode, std::move(vertices)).kernel(t);
}

SemigroupResiduals semigroup_checks(const HeatSemigroup& semigroup, double s, double t, const Eigen::VectorXd& u) {
  require_time(s);
  require_time(t);
  SemigroupResiduals out;
  const Eigen::MatrixXd product = semigroup.kernel(s).kernel * semigroup.kernel(t).kernel;
  out.composition = (product - semigroup.kernel(s + t).kernel).cwiseAbs().maxCoeff();
  const Eigen::VectorXd st_u = semigroup.apply(t, u);
  out.contraction = std::max(0.0, st_u.norm() - u.norm());
  out.continuity = (u - st_u).norm();
  if (t > 0.0) out.generator = (semigroup.difference_quotient(t, u) - semigroup.generator() * u).norm();
  return out;
}

double generator_halving_ratio(const HeatSemigroup& semigroup, double h, const Eigen::VectorXd& u) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidParameter, "step must be positive");
  const Eigen::VectorXd lap_u = semigroup.generator() * u;
  const double coarse = (semigroup.difference_quotient(h, u) - lap_u).norm();
  const double fine = (semigroup.difference_quotient(0.5 * h, u) - lap_u).norm();
  return coarse > 0.0 ? fine / coarse : 0.0;
}

MassSequence stochastic_mass(const ResistanceNetwork& net, const Exhaustion& exhaustion, double t, Index x,
                             double tolerance) {
  require_time(t);
  if (exhaustion.max_vertex() >= net.size()) {
    throw Error(ErrorCode::TruncationTooSmall, "exhaustion reaches beyond the truncation");
  }
  const auto& first = exhaustion[0];
  const auto pos = std::lower_bound(first.begin(), first.end(), x);
  if (pos == first.end() || *pos != x) throw Error(ErrorCode::TruncationTooSmall, "x is not in F_1");

  MassSequence out;
  for (Index k = 0; k < exhaustion.count(); ++k) {
    const auto& set = exhaustion[k];
    const auto row = static_cast<Eigen::Index>(std::lower_bound(set.begin(), set.end(), x) - set.begin());
    const double mass =
        t == 0.0 ? 1.0 : dirichlet_mass(truncated_laplacian(net, set, TruncationMode::DirichletInterior), row, t);
    if (!out.mass.empty() && mass < out.mass.back() - tolerance) out.monotone = false;
    out.max_excess = std::max(out.max_excess, mass - 1.0);
    out.k.push_back(set.back());
    out.mass.push_back(mass);
  }
  out.estimate = out.mass.back();
  return out;
}

MassSequence stochastic_mass(const FamilySpec& family, Index k_min, Index k_max, double t, Index x,
                             double tolerance) {
  if (!family.is_half_line()) {
    throw Error(ErrorCode::UnsupportedTopology, "interval exhaustions need a half-line family");
  }
  FamilySpec spec = family;
  spec.size = k_max + 2;
  return stochastic_mass(generate(spec), Exhaustion::intervals(0, k_min, k_max), t, x, tolerance);
}

std::string verdict_name(TrendVerdict verdict) {
  return verdict == TrendVerdict::CriterionMet ? "criterion_met" : "inconclusive";
}

TrendVerdict classify_divergence(const std::vector<double>& terms) {
  if (terms.size() < 4) return TrendVerdict::Inconclusive;
  const std::size_t start = terms.size() / 2;
  std::vector<double> log_index, log_term;
  for (std::size_t i = start; i < terms.size(); ++i) {
    if (std::isinf(terms[i])) return TrendVerdict::CriterionMet;
    if (!(terms[i] > 0.0)) return TrendVerdict::Inconclusive;
    log_index.push_back(std::log(static_cast<double>(i + 1)));
    log_term.push_back(std::log(terms[i]));
  }
  return slope(log_index, log_term) >= -1.0 - 1e-9 ? TrendVerdict::CriterionMet : TrendVerdict::Inconclusive;
}

WojciechowskiReport wojciechowski_criterion(const std::vector<double>& valency_profile) {
  WojciechowskiReport report;
  report.valency = valency_profile;
  report.radii.resize(valency_profile.size());
  std::iota(report.radii.begin(), report.radii.end(), Index{0});
  report.partial_sums = running_reciprocal_sums(valency_profile);
  std::vector<double> terms;
  for (double m : valency_profile) terms.push_back(m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity());
  report.verdict = classify_divergence(terms);
  report.spherically_symmetric = true;
  return report;
}

WojciechowskiReport wojciechowski_criterion(const ResistanceNetwork& net, Index x0, Index r_max) {
  if (x0 >= net.size()) throw Error(ErrorCode::InvalidParameter, "x0 is not a vertex");
  std::vector<Index> distance(net.size(), std::numeric_limits<Index>::max());
  std::queue<Index> queue;
  distance[x0] = 0;
  queue.push(x0);
  Index deepest = 0;
  while (!queue.empty()) {
    const Index x = queue.front();
    queue.pop();
    deepest = std::max(deepest, distance[x]);
    for (const auto& nb : net.neighbors(x)) {
      if (distance[nb.vertex] == std::numeric_limits<Index>::max()) {
        distance[nb.vertex] = distance[x] + 1;
        queue.push(nb.vertex);
      }
    }
  }
  // The outermost sphere of a truncation has cut valencies.
  const Index last = deepest == 0 ? 0 : std::min(r_max, deepest - 1);
  std::vector<Index> max_valency(last + 1, 0), min_valency(last + 1, std::numeric_limits<Index>::max());
  for (Index x = 0; x < net.size(); ++x) {
    const Index r = distance[x];
    if (r > last) continue;
    const Index m = net.neighbors(x).size();
    max_valency[r] = std::max(max_valency[r], m);
    min_valency[r] = std::min(min_valency[r], m);
  }
  std::vector<double> profile(max_valency.begin(), max_valency.end());
  WojciechowskiReport report = wojciechowski_criterion(profile);
  const bool tree = net.edges().size() + 1 == net.size();
  bool uniform = true;
  for (Index r = 0; r <= last; ++r) uniform = uniform && max_valency[r] == min_valency[r];
  report.spherically_symmetric = tree && uniform;
  return report;
}

BandProfile band_profile(const Eigen::MatrixXd& matrix) {
  BandProfile profile;
  Index widest = 0;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const auto count = static_cast<Index>((matrix.row(i).array() != 0.0).count());
    profile.per_row_nonzeros.push_back(count);
    widest = std::max(widest, count);
  }
  if (widest < static_cast<Index>(matrix.cols())) profile.uniform_band = widest;
  return profile;
}

BandProfile band_profile(const MatrixLaplacianView& view) { return band_profile(view.entries); }

GrowthReport off_diagonal_growth(const Eigen::MatrixXd& matrix, const Exhaustion& exhaustion) {
  const auto n = static_cast<Index>(matrix.rows());
  if (exhaustion.max_vertex() >= n) throw Error(ErrorCode::TruncationTooSmall, "exhaustion reaches beyond the matrix");
  GrowthReport report;
  for (Index k = 0; k < exhaustion.count(); ++k) {
    const auto& set = exhaustion[k];
    std::vector<bool> inside(n, false);
    for (Index x : set) inside[x] = true;
    std::vector<Eigen::Index> rows;
    for (Index x = 0; x < n; ++x) {
      if (!inside[x]) rows.push_back(static_cast<Eigen::Index>(x));
    }
    if (rows.empty()) throw Error(ErrorCode::TruncationTooSmall, "F_k exhausts the whole truncation");
    Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < set.size(); ++j) {
        block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            matrix(rows[i], static_cast<Eigen::Index>(set[j]));
      }
    }
    double norm = 0.0;
    if ((block.array() != 0.0).count() <= 1) {
      norm = block.cwiseAbs().maxCoeff();
    } else {
      norm = Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues()(0);
    }
    report.k.push_back(set.back());
    report.norms.push_back(norm);
  }
  report.partial_sums = running_reciprocal_sums(report.norms);
  std::vector<double> terms;
  for (double norm : report.norms) terms.push_back(norm > 0.0 ? 1.0 / norm : std::numeric_limits<double>::infinity());
  report.verdict = classify_divergence(terms);
  return report;
}

GrowthReport off_diagonal_growth(const MatrixLaplacianView& view, const Exhaustion& exhaustion) {
  return off_diagonal_growth(view.entries, exhaustion);
}

void write_mass_csv(std::ostream& os, const MassSequence& masses) {
  os << "k,mass\n";
  for (std::size_t i = 0; i < masses.k.size(); ++i) os << masses.k[i] << ',' << format_double(masses.mass[i]) << '\n';
}

void write_growth_json(std::ostream& os, const GrowthReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.k.size(); ++i) {
    rows.push_back({{"k", report.k[i]}, {"norm", report.norms[i]}, {"partial_sum", report.partial_sums[i]}});
  }
  nlohmann::ordered_json doc = {{"rows", rows}, {"verdict", verdict_name(report.verdict)}};
  os << doc.dump(2) << '\n';
}

void write_kernel_csv(std::ostream& os, const ResistanceNetwork& net, const HeatKernelSlice& slice) {
  os << "vertex";
  for (Index x : slice.vertices) os << ',' << net.label(x);
  os << '\n';
  for (std::size_t i = 0; i < slice.vertices.size(); ++i) {
    os << net.label(slice.vertices[i]);
    for (std::size_t j = 0; j < slice.vertices.size(); ++j) {
      os << ',' << format_double(slice.kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    os << '\n';
  }
}

}  // namespace netlap
