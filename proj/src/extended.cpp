#include "extended.hpp"

#include "netlap/error.hpp"

namespace netlap::detail {

MatrixX extended_dipoles(const ResistanceNetwork& net, Index origin, const std::vector<Index>& index_set) {
  const auto n = static_cast<Eigen::Index>(net.size());
  const auto j = static_cast<Eigen::Index>(index_set.size());
  auto reduced = [origin](Index x) { return static_cast<Eigen::Index>(x < origin ? x : x - 1); };

  MatrixX lap = MatrixX::Zero(n - 1, n - 1);
  for (Index x = 0; x < net.size(); ++x) {
    if (x == origin) continue;
    for (const auto& nb : net.neighbors(x)) {
      lap(reduced(x), reduced(x)) += nb.c;
      if (nb.vertex != origin) lap(reduced(x), reduced(nb.vertex)) -= nb.c;
    }
  }
  Eigen::LLT<MatrixX> llt(lap);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "reduced Laplacian is not positive definite");
  MatrixX rhs = MatrixX::Zero(n - 1, j);
  for (Eigen::Index i = 0; i < j; ++i) rhs(reduced(index_set[static_cast<std::size_t>(i)]), i) = 1;
  const MatrixX solved = llt.solve(rhs);
  MatrixX dipoles = MatrixX::Zero(n, j);
  for (Index y = 0; y < net.size(); ++y) {
    if (y != origin) dipoles.row(static_cast<Eigen::Index>(y)) = solved.row(reduced(y));
  }
  return dipoles;
}

MatrixX extended_pairing(const ResistanceNetwork& net, const MatrixX& a, const MatrixX& b) {
  MatrixX out = MatrixX::Zero(a.cols(), b.cols());
  for (const auto& e : net.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    out.noalias() += static_cast<RealX>(e.c) * (a.row(u) - a.row(v)).transpose() * (b.row(u) - b.row(v));
  }
  return out;
}

MatrixX extended_laplacian(const ResistanceNetwork& net, const MatrixX& a) {
  MatrixX out = MatrixX::Zero(a.rows(), a.cols());
  for (const auto& e : net.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    const MatrixX diff = static_cast<RealX>(e.c) * (a.row(u) - a.row(v));
    out.row(u) += diff;
    out.row(v) -= diff;
  }
  return out;
}

}  // namespace netlap::detail
