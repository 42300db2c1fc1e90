#include "netlap/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <utility>

#include "netlap/error.hpp"
#include "netlap/random.hpp"

namespace netlap {

namespace {

std::string edge_text(Index u, Index v, double c) {
  std::ostringstream os;
  os << "edge (" << u << ", " << v << ") with conductance " << c;
  return os.str();
}

// Breadth-first reachability from `start` over edges with positive weight.
std::vector<bool> reachable(const std::vector<std::vector<Neighbor>>& adj, Index start) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<Index> queue;
  seen[start] = true;
  queue.push(start);
  while (!queue.empty()) {
    Index x = queue.front();
    queue.pop();
    for (const auto& nb : adj[x]) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = true;
        queue.push(nb.vertex);
      }
    }
  }
  return seen;
}

}  // namespace

std::string_view family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::GeometricHalfline: return "geometric_halfline";
    case FamilyKind::UnitPath: return "unit_path";
    case FamilyKind::BinaryTree: return "binary_tree";
    case FamilyKind::Complete: return "complete";
    case FamilyKind::RandomWeighted: return "random_weighted";
  }
  return "unknown";
}

std::optional<FamilyKind> family_from_name(std::string_view name) {
  if (name == "geometric_halfline" || name == "geometric") return FamilyKind::GeometricHalfline;
  if (name == "unit_path" || name == "path") return FamilyKind::UnitPath;
  if (name == "binary_tree" || name == "tree") return FamilyKind::BinaryTree;
  if (name == "complete") return FamilyKind::Complete;
  if (name == "random_weighted" || name == "random") return FamilyKind::RandomWeighted;
  return std::nullopt;
}

ResistanceNetwork ResistanceNetwork::build(std::span<const Edge> edges, Index origin, Index vertex_count,
                                           std::vector<std::string> labels) {
  if (edges.empty()) throw Error(ErrorCode::EmptyNetwork, "no edges");
  Index n = std::max(vertex_count, static_cast<Index>(labels.size()));
  for (const auto& e : edges) n = std::max({n, e.u + 1, e.v + 1});
  if (!labels.empty() && labels.size() != n) {
    throw Error(ErrorCode::InvalidParameter, "edge refers to a vertex without a label");
  }
  if (origin >= n) throw Error(ErrorCode::InvalidParameter, "origin is not a vertex");

  std::map<std::pair<Index, Index>, double> weights;
  for (const auto& e : edges) {
    if (!std::isfinite(e.c)) throw Error(ErrorCode::InvalidParameter, edge_text(e.u, e.v, e.c));
    if (e.c < 0.0) throw Error(ErrorCode::NegativeConductance, edge_text(e.u, e.v, e.c));
    if (e.u == e.v) {
      if (e.c > 0.0) throw Error(ErrorCode::SelfLoop, edge_text(e.u, e.v, e.c));
      continue;
    }
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = weights.emplace(key, e.c);
    if (!inserted && it->second != e.c) {
      throw Error(ErrorCode::InvalidParameter, "conflicting duplicate " + edge_text(e.u, e.v, e.c));
    }
  }

  ResistanceNetwork net;
  net.origin_ = origin;
  net.neighbors_.assign(n, {});
  net.total_.assign(n, 0.0);
  net.external_.assign(n, 0.0);
  for (const auto& [key, c] : weights) {
    if (c == 0.0) continue;
    net.edges_.push_back({key.first, key.second, c});
    net.neighbors_[key.first].push_back({key.second, c});
    net.neighbors_[key.second].push_back({key.first, c});
    net.total_[key.first] += c;
    net.total_[key.second] += c;
  }
  if (net.edges_.empty()) throw Error(ErrorCode::EmptyNetwork, "no edge with positive conductance");

  auto seen = reachable(net.neighbors_, origin);
  for (Index x = 0; x < n; ++x) {
    if (!seen[x]) {
      throw Error(ErrorCode::Disconnected, "vertex " + std::to_string(x) + " is not reachable from the origin");
    }
  }

  if (labels.empty()) {
    labels.reserve(n);
    for (Index x = 0; x < n; ++x) labels.push_back(std::to_string(x));
  }
  net.labels_ = std::move(labels);

  std::vector<ExactRational> exact;
  exact.reserve(net.edges_.size());
  for (const auto& e : net.edges_) exact.emplace_back(e.c);  // every finite double is an exact rational
  net.exact_ = std::move(exact);
  return net;
}

double ResistanceNetwork::conductance(Index x, Index y) const {
  for (const auto& nb : neighbors_[x]) {
    if (nb.vertex == y) return nb.c;
  }
  return 0.0;
}

std::optional<Index> ResistanceNetwork::find_label(std::string_view label) const {
  for (Index x = 0; x < labels_.size(); ++x) {
    if (labels_[x] == label) return x;
  }
  return std::nullopt;
}

ResistanceNetwork ResistanceNetwork::with_origin(Index origin) const {
  if (origin >= size()) throw Error(ErrorCode::InvalidParameter, "origin is not a vertex");
  ResistanceNetwork copy = *this;
  copy.origin_ = origin;
  return copy;
}

Eigen::MatrixXd ResistanceNetwork::laplacian_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    a(u, v) -= e.c;
    a(v, u) -= e.c;
    a(u, u) += e.c;
    a(v, v) += e.c;
  }
  return a;
}

Eigen::SparseMatrix<double> ResistanceNetwork::sparse_laplacian() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * edges_.size());
  for (const auto& e : edges_) {
    const auto u = static_cast<int>(e.u);
    const auto v = static_cast<int>(e.v);
    triplets.emplace_back(u, v, -e.c);
    triplets.emplace_back(v, u, -e.c);
    triplets.emplace_back(u, u, e.c);
    triplets.emplace_back(v, v, e.c);
  }
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

ResistanceNetwork generate(const FamilySpec& spec) {
  std::vector<Edge> edges;
  std::vector<ExactRational> exact;
  std::vector<std::pair<Index, double>> external;
  Index n = spec.size;

  switch (spec.kind) {
    case FamilyKind::GeometricHalfline: {
      if (spec.ratio <= 1) throw Error(ErrorCode::InvalidParameter, "geometric half-line needs b > 1");
      if (n < 2) throw Error(ErrorCode::InvalidParameter, "truncation size must be at least 2");
      for (Index k = 1; k < n; ++k) {
        exact.push_back(pow(spec.ratio, k));
        edges.push_back({k - 1, k, exact.back().get_d()});
      }
      external.emplace_back(n - 1, pow(spec.ratio, n).get_d());
      break;
    }
    case FamilyKind::UnitPath: {
      if (n < 2) throw Error(ErrorCode::InvalidParameter, "truncation size must be at least 2");
      for (Index k = 1; k < n; ++k) {
        edges.push_back({k - 1, k, 1.0});
        exact.emplace_back(1);
      }
      external.emplace_back(n - 1, 1.0);
      break;
    }
    case FamilyKind::BinaryTree: {
      if (n < 1 || n > 20) throw Error(ErrorCode::InvalidParameter, "binary tree depth must be in [1, 20]");
      const Index count = (Index{1} << (n + 1)) - 1;
      const Index first_leaf = (Index{1} << n) - 1;
      for (Index child = 1; child < count; ++child) {
        edges.push_back({(child - 1) / 2, child, 1.0});
        exact.emplace_back(1);
      }
      for (Index leaf = first_leaf; leaf < count; ++leaf) external.emplace_back(leaf, 2.0);
      n = count;
      break;
    }
    case FamilyKind::Complete: {
      if (n < 2) throw Error(ErrorCode::InvalidParameter, "truncation size must be at least 2");
      for (Index u = 0; u < n; ++u) {
        for (Index v = u + 1; v < n; ++v) {
          edges.push_back({u, v, 1.0});
          exact.emplace_back(1);
        }
      }
      break;
    }
    case FamilyKind::RandomWeighted: {
      if (n < 2) throw Error(ErrorCode::InvalidParameter, "truncation size must be at least 2");
      SplitMix64 rng(spec.seed);
      // random spanning tree first, so the result is always connected
      std::map<std::pair<Index, Index>, double> chosen;
      for (Index v = 1; v < n; ++v) {
        const Index parent = rng.below(v);
        chosen[{parent, v}] = 0.1 + 1.9 * rng.uniform();
      }
      for (Index u = 0; u < n; ++u) {
        for (Index v = u + 1; v < n; ++v) {
          const double coin = rng.uniform();
          const double weight = 0.1 + 1.9 * rng.uniform();
          if (coin < 0.3 && !chosen.contains({u, v})) chosen[{u, v}] = weight;
        }
      }
      for (const auto& [key, c] : chosen) {
        edges.push_back({key.first, key.second, c});
        exact.emplace_back(c);
      }
      break;
    }
  }

  ResistanceNetwork net = ResistanceNetwork::build(edges, 0, n);
  net.family_ = spec;
  // build() sorts edges canonically; generated edges are already (u<v) but
  // may differ in order, so align the exact weights by lookup.
  std::map<std::pair<Index, Index>, ExactRational> exact_by_edge;
  for (std::size_t i = 0; i < edges.size(); ++i) exact_by_edge[{edges[i].u, edges[i].v}] = exact[i];
  std::vector<ExactRational> aligned;
  aligned.reserve(net.edges_.size());
  for (const auto& e : net.edges_) aligned.push_back(exact_by_edge.at({e.u, e.v}));
  net.exact_ = std::move(aligned);
  for (const auto& [x, c] : external) net.external_[x] = c;
  return net;
}

ResistanceNetwork with_family(ResistanceNetwork net, const FamilySpec& spec) {
  ResistanceNetwork reference = generate(spec);
  if (reference.size() != net.size() || reference.edges().size() != net.edges().size()) {
    throw Error(ErrorCode::InvalidParameter, "network does not match its declared family");
  }
  for (std::size_t i = 0; i < net.edges().size(); ++i) {
    const auto& a = net.edges()[i];
    const auto& b = reference.edges()[i];
    if (a.u != b.u || a.v != b.v || std::abs(a.c - b.c) > 1e-12 * std::max(1.0, std::abs(b.c))) {
      throw Error(ErrorCode::InvalidParameter, "network does not match its declared family");
    }
  }
  net.family_ = reference.family_;
  net.exact_ = reference.exact_;
  net.external_ = reference.external_;
  return net;
}

MatrixLaplacianView MatrixLaplacianView::from_network(const ResistanceNetwork& net) {
  MatrixLaplacianView view;
  view.entries = net.laplacian_matrix();
  view.outside_row_mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  for (Index x = 0; x < net.size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    view.entries(i, i) += net.external_conductance(x);
    view.outside_row_mass(i) = net.external_conductance(x);
  }
  return view;
}

MatrixLaplacianView MatrixLaplacianView::from_matrix(Eigen::MatrixXd entries) {
  MatrixLaplacianView view;
  view.outside_row_mass = Eigen::VectorXd::Zero(entries.rows());
  view.entries = std::move(entries);
  return view;
}

std::string_view condition_name(LaplacianCondition condition) {
  switch (condition) {
    case LaplacianCondition::Symmetry: return "symmetry";
    case LaplacianCondition::OffDiagonalSign: return "off_diagonal_sign";
    case LaplacianCondition::RowSum: return "row_sum";
    case LaplacianCondition::DiagonalSign: return "diagonal_sign";
  }
  return "unknown";
}

std::vector<Violation> validate_matrix_laplacian(const MatrixLaplacianView& a, double tolerance) {
  std::vector<Violation> report;
  const Eigen::Index n = a.entries.rows();
  if (a.entries.cols() != n) {
    report.push_back({LaplacianCondition::Symmetry, static_cast<Index>(n), static_cast<Index>(a.entries.cols()),
                      std::numeric_limits<double>::quiet_NaN()});
    return report;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = std::max(1.0, std::abs(a.entries(i, i)));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double diff = a.entries(i, j) - a.entries(j, i);
      if (std::abs(diff) > tolerance * std::max(scale, std::abs(a.entries(j, j)))) {
        report.push_back({LaplacianCondition::Symmetry, static_cast<Index>(i), static_cast<Index>(j), diff});
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && a.entries(i, j) > tolerance) {
        report.push_back({LaplacianCondition::OffDiagonalSign, static_cast<Index>(i), static_cast<Index>(j),
                          a.entries(i, j)});
      }
    }
    const double outside = a.outside_row_mass.size() == n ? a.outside_row_mass(i) : 0.0;
    const double row = a.entries.row(i).sum() - outside;
    if (std::abs(row) > tolerance * scale) {
      report.push_back({LaplacianCondition::RowSum, static_cast<Index>(i), static_cast<Index>(i), row});
    }
    if (a.entries(i, i) < -tolerance) {
      report.push_back({LaplacianCondition::DiagonalSign, static_cast<Index>(i), static_cast<Index>(i),
                        a.entries(i, i)});
    }
  }
  return report;
}

Exhaustion::Exhaustion(std::vector<std::vector<Index>> sets, std::optional<Index> origin)
    : sets_(std::move(sets)), origin_(origin) {
  if (sets_.empty()) throw Error(ErrorCode::InvalidParameter, "exhaustion has no sets");
  for (auto& set : sets_) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.empty()) throw Error(ErrorCode::InvalidParameter, "exhaustion set is empty");
    if (origin_ && std::binary_search(set.begin(), set.end(), *origin_)) {
      throw Error(ErrorCode::InvalidParameter, "exhaustion set contains the origin");
    }
  }
  for (std::size_t k = 1; k < sets_.size(); ++k) {
    if (!std::includes(sets_[k].begin(), sets_[k].end(), sets_[k - 1].begin(), sets_[k - 1].end())) {
      throw Error(ErrorCode::InvalidParameter, "exhaustion sets are not nested at k=" + std::to_string(k));
    }
  }
}

Exhaustion Exhaustion::intervals(Index first, Index kmin, Index kmax) {
  if (kmin < first || kmax < kmin) throw Error(ErrorCode::InvalidParameter, "empty interval exhaustion");
  std::vector<std::vector<Index>> sets;
  for (Index k = kmin; k <= kmax; ++k) {
    std::vector<Index> set;
    for (Index x = first; x <= k; ++x) set.push_back(x);
    sets.push_back(std::move(set));
  }
  return Exhaustion(std::move(sets), first > 0 ? std::optional<Index>(0) : std::nullopt);
}

bool Exhaustion::union_covers(const ResistanceNetwork& net) const {
  const auto& last = sets_.back();
  const Index origin = origin_.value_or(net.origin());
  Index expected = net.size() - (origin < net.size() ? 1 : 0);
  if (last.size() != expected) return false;
  return std::none_of(last.begin(), last.end(), [&](Index x) { return x == origin || x >= net.size(); });
}

Index Exhaustion::max_vertex() const { return sets_.back().back(); }

template <typename Scalar>
void require_defined(const ResistanceNetwork& net, const BasicVertexFunction<Scalar>& u) {
  if (static_cast<Index>(u.size()) != net.size()) {
    throw Error(ErrorCode::MissingValue, "function has " + std::to_string(u.size()) + " values for " +
                                             std::to_string(net.size()) + " vertices");
  }
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::isnan(std::abs(u(i)))) {
      throw Error(ErrorCode::MissingValue, "function undefined at vertex " + net.label(static_cast<Index>(i)));
    }
  }
}

template <typename Scalar>
BasicLaplacianValues<Scalar> apply_laplacian(const ResistanceNetwork& net, const BasicVertexFunction<Scalar>& u) {
  require_defined(net, u);
  BasicLaplacianValues<Scalar> out;
  out.values = BasicVertexFunction<Scalar>::Zero(u.size());
  for (Index x = 0; x < net.size(); ++x) {
    Scalar sum{0};
    const auto ux = u(static_cast<Eigen::Index>(x));
    for (const auto& nb : net.neighbors(x)) sum += nb.c * (ux - u(static_cast<Eigen::Index>(nb.vertex)));
    out.values(static_cast<Eigen::Index>(x)) = sum;
    if (net.is_truncation_boundary(x)) out.boundary_inexact.push_back(x);
  }
  return out;
}

template <typename Scalar>
Scalar energy(const ResistanceNetwork& net, const BasicVertexFunction<Scalar>& u,
              const BasicVertexFunction<Scalar>& v) {
  require_defined(net, u);
  require_defined(net, v);
  Scalar sum{0};
  for (const auto& e : net.edges()) {
    const auto a = static_cast<Eigen::Index>(e.u);
    const auto b = static_cast<Eigen::Index>(e.v);
    if constexpr (std::is_same_v<Scalar, double>) {
      sum += e.c * (u(a) - u(b)) * (v(a) - v(b));
    } else {
      sum += e.c * std::conj(u(a) - u(b)) * (v(a) - v(b));
    }
  }
  return sum;
}

template void require_defined(const ResistanceNetwork&, const VertexFunction&);
template void require_defined(const ResistanceNetwork&, const ComplexVertexFunction&);
template LaplacianValues apply_laplacian(const ResistanceNetwork&, const VertexFunction&);
template BasicLaplacianValues<std::complex<double>> apply_laplacian(const ResistanceNetwork&,
                                                                    const ComplexVertexFunction&);
template double energy(const ResistanceNetwork&, const VertexFunction&, const VertexFunction&);
template std::complex<double> energy(const ResistanceNetwork&, const ComplexVertexFunction&,
                                     const ComplexVertexFunction&);

Eigen::MatrixXd energy_gram(const ResistanceNetwork& net, const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (lhs.rows() != n || rhs.rows() != n) {
    throw Error(ErrorCode::MissingValue, "energy_gram: column length does not match vertex count");
  }
  const auto m = static_cast<Eigen::Index>(net.edges().size());
  Eigen::MatrixXd dl(m, lhs.cols());
  Eigen::MatrixXd dr(m, rhs.cols());
  Eigen::VectorXd c(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& e = net.edges()[static_cast<std::size_t>(k)];
    const auto a = static_cast<Eigen::Index>(e.u);
    const auto b = static_cast<Eigen::Index>(e.v);
    dl.row(k) = lhs.row(a) - lhs.row(b);
    dr.row(k) = rhs.row(a) - rhs.row(b);
    c(k) = e.c;
  }
  return dl.transpose() * c.asDiagonal() * dr;
}

double dirichlet_identity_residual(const ResistanceNetwork& net, const VertexFunction& u) {
  const auto lap = apply_laplacian(net, u);
  return std::abs(u.dot(lap.values) - energy(net, u, u));
}

std::vector<double> principal_minor_check(const MatrixLaplacianView& a, const Exhaustion& exhaustion) {
  std::vector<double> dets;
  dets.reserve(exhaustion.count());
  for (const auto& set : exhaustion.sets()) {
    const auto k = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const auto r = static_cast<Eigen::Index>(set[static_cast<std::size_t>(i)]);
        const auto s = static_cast<Eigen::Index>(set[static_cast<std::size_t>(j)]);
        if (r >= a.entries.rows() || s >= a.entries.rows()) {
          throw Error(ErrorCode::TruncationTooSmall, "exhaustion set leaves the matrix");
        }
        sub(i, j) = a.entries(r, s);
      }
    }
    dets.push_back(sub.fullPivLu().determinant());
  }
  return dets;
}

PathKernel path_kernel_constant(const ResistanceNetwork& net, Index x, Index y) {
  if (x >= net.size() || y >= net.size()) throw Error(ErrorCode::InvalidParameter, "vertex out of range");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.size(), inf);
  std::vector<Index> prev(net.size(), net.size());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[x] = 0.0;
  heap.emplace(0.0, x);
  while (!heap.empty()) {
    auto [d, w] = heap.top();
    heap.pop();
    if (d > dist[w]) continue;
    if (w == y) break;
    for (const auto& nb : net.neighbors(w)) {
      const double nd = d + 1.0 / nb.c;
      if (nd < dist[nb.vertex]) {
        dist[nb.vertex] = nd;
        prev[nb.vertex] = w;
        heap.emplace(nd, nb.vertex);
      }
    }
  }
  if (dist[y] == inf) throw Error(ErrorCode::Disconnected, "no path between the vertices");
  PathKernel out;
  out.k = std::sqrt(dist[y]);
  for (Index w = y; w != net.size(); w = prev[w]) {
    out.path.push_back(w);
    if (w == x) break;
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

VertexFunction delta(Index n, Index x) {
  VertexFunction d = VertexFunction::Zero(static_cast<Eigen::Index>(n));
  d(static_cast<Eigen::Index>(x)) = 1.0;
  return d;
}

}  // namespace netlap
