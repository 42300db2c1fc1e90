#include <doctest.h>

#include <cmath>
#include <numbers>

#include "netlap/error.hpp"
#include "netlap/reciprocity.hpp"
#include "oracle.hpp"

using namespace netlap;

namespace {

FamilySpec spec(FamilyKind kind, Index size, ExactRational ratio = 2, std::uint64_t seed = 0) {
  FamilySpec s;
  s.kind = kind;
  s.size = size;
  s.ratio = ratio;
  s.seed = seed;
  return s;
}

EigenSystem eigen_of(const ResistanceNetwork& net, std::vector<Index> f) {
  return diagonalize_gram(gram_matrix(net, 0, std::move(f)));
}

}  // namespace

TEST_CASE("diagonalize_gram") {
  GramMatrix one;
  one.entries = Eigen::MatrixXd::Ones(1, 1);
  one.index_order = {1};
  const EigenSystem e1 = diagonalize_gram(one);
  CHECK(e1.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(e1.eigenvectors(0, 0) == doctest::Approx(1.0));

  const auto path = generate(spec(FamilyKind::UnitPath, 4));
  const GramMatrix m = gram_matrix(path, 0, {1, 2, 3});
  const EigenSystem e = diagonalize_gram(m);
  CHECK(e.eigenvalues.minCoeff() > 0.0);
  CHECK(e.eigenvalues.prod() == doctest::Approx(1.0));
  CHECK(e.eigenvalues.sum() == doctest::Approx(m.entries.trace()));
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(e.eigenvectors(0, j) > 0.0);

  GramMatrix bad;
  bad.entries = Eigen::MatrixXd::Zero(2, 2);
  bad.entries(0, 0) = 1.0;
  bad.index_order = {1, 2};
  CHECK_THROWS_AS(diagonalize_gram(bad), Error);
}

TEST_CASE("expectation") {
  CHECK(expectation(Eigen::VectorXd::Unit(3, 1)) == 1.0);
  Eigen::VectorXd balanced(3);
  balanced << 1, -2, 1;
  CHECK(expectation(balanced) == 0.0);
  CHECK(expectation(Eigen::VectorXd::Constant(4, 0.5)) == doctest::Approx(2.0));
}

TEST_CASE("the family u_λ is energy-orthonormal") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 4.0}}, 0);
  const auto d1 = dipole_family(pair, 0, {1});
  const OnbFamily single = build_onb(diagonalize_gram(gram_matrix(pair, d1)), d1);
  CHECK(energy(pair, VertexFunction(single.members.col(0))) == doctest::Approx(1.0));

  for (const auto& [net, f] : {std::pair{generate(spec(FamilyKind::UnitPath, 4)), std::vector<Index>{1, 2, 3}},
                               std::pair{generate(spec(FamilyKind::GeometricHalfline, 4)), std::vector<Index>{1, 2}}}) {
    const auto dip = dipole_family(net, 0, f);
    const OnbFamily onb = build_onb(diagonalize_gram(gram_matrix(net, dip)), dip);
    const Eigen::MatrixXd g = energy_gram(net, onb.members, onb.members);
    CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("P_F δ_o") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 1.0}}, 0);
  const EigenSystem e = eigen_of(pair, {1});
  CHECK(project_delta_o(e)(0) == doctest::Approx(-1.0));
  const auto v = solve_dipole(pair, 0, 1);
  CHECK(energy(pair, v, delta(2, 0)) == doctest::Approx(-1.0));

  // ‖P_F δ_o‖² = 1ᵀ M⁻¹ 1 computed by brute-force inversion.
  const auto path = generate(spec(FamilyKind::UnitPath, 4));
  const GramMatrix m = gram_matrix(path, 0, {1, 2, 3});
  oracle::Matrix dense(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) dense[i][j] = m.entries(i, j);
  }
  double direct = 0.0;
  for (const auto& row : oracle::inverse(dense)) {
    for (double x : row) direct += x;
  }
  CHECK(projection_norm_bounds(diagonalize_gram(m)).value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("compression matrix") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 1.0}}, 0);
  const CompressionMatrix t = compression_matrix(eigen_of(pair, {1}));
  CHECK(t.entries(0, 0) == doctest::Approx(2.0));

  EigenSystem synthetic;
  synthetic.eigenvalues = Eigen::Vector2d(1.0, 4.0);
  synthetic.eigenvectors.resize(2, 2);
  synthetic.eigenvectors << 1, 1, -1, -1;
  synthetic.eigenvectors /= std::sqrt(2.0);
  synthetic.index_order = {1, 2};
  const CompressionMatrix d = compression_matrix(synthetic);
  CHECK(d.entries(0, 0) == doctest::Approx(1.0));
  CHECK(d.entries(1, 1) == doctest::Approx(0.25));
  CHECK(std::abs(d.entries(0, 1)) < 1e-15);
}

TEST_CASE("T_F and the compressed Laplacian share a spectrum") {
  const auto rnd = generate(spec(FamilyKind::RandomWeighted, 6, 2, 2));
  const ReciprocityReport r = verify_reciprocity(rnd, 0, all_but(rnd, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(0.5 * (r.compressed + r.compressed.transpose()), Eigen::EigenvaluesOnly);
  const CompressionMatrix t = compression_matrix(eigen_of(rnd, all_but(rnd, 0)));
  CHECK((a.eigenvalues() - t.spectrum).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("spectral reciprocity") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 1.0}}, 0);
  const ReciprocityReport r2 = verify_reciprocity(pair, 0, {1});
  CHECK(r2.compressed(0, 0) == doctest::Approx(2.0));
  CHECK(r2.predicted(0, 0) == doctest::Approx(2.0));
  CHECK(r2.residual < 1e-14);

  const auto path = generate(spec(FamilyKind::UnitPath, 5));
  CHECK(verify_reciprocity(path, 0, {1, 2, 3, 4}).residual < 1e-8);
  const auto rnd = generate(spec(FamilyKind::RandomWeighted, 10, 2, 1));
  const ReciprocityReport r = verify_reciprocity(rnd, 0, all_but(rnd, 0));
  CHECK(r.residual < 1e-8);
  CHECK(r.orthonormality < 1e-8);
  const auto geo = generate(spec(FamilyKind::GeometricHalfline, 16));
  CHECK(verify_reciprocity(geo, 0, all_but(geo, 0)).residual < 1e-8);
}

TEST_CASE("eigen-expectation identity and projection bounds") {
  const auto path = generate(spec(FamilyKind::UnitPath, 4));
  const EigenSystem e = eigen_of(path, {1, 2, 3});
  CHECK(expectation_identity_residual(e) < 1e-12);
  const ProjectionNormBounds b = projection_norm_bounds(e);
  CHECK(b.lower < b.value);
  CHECK(b.value < b.upper);

  const auto geo = generate(spec(FamilyKind::GeometricHalfline, 6));
  const ProjectionNormBounds g = projection_norm_bounds(eigen_of(geo, all_but(geo, 0)));
  CHECK(g.lower <= g.value);
  CHECK(g.value <= g.upper);

  const auto pair = build_network(std::vector<Edge>{{0, 1, 2.0}}, 0);
  const ProjectionNormBounds one = projection_norm_bounds(eigen_of(pair, {1}));
  CHECK(one.lower == doctest::Approx(one.value));
  CHECK(one.upper == doctest::Approx(one.value));
  CHECK(one.value == doctest::Approx(2.0));
}

TEST_CASE("spectral measures") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 1.0}}, 0);
  const SpectralMeasure mu = spectral_measure(compression_matrix(eigen_of(pair, {1})));
  REQUIRE(mu.atoms.size() == 1);
  CHECK(mu.atoms[0].sigma == doctest::Approx(2.0));
  CHECK(mu.atoms[0].weight == 1.0);

  const auto path = generate(spec(FamilyKind::UnitPath, 5));
  const SpectralMeasure m5 = spectral_measure(compression_matrix(eigen_of(path, {1, 2, 3, 4})));
  double total = 0.0;
  for (const auto& a : m5.atoms) {
    total += a.weight;
    CHECK(a.sigma > 0.0);
  }
  CHECK(total == doctest::Approx(1.0));

  const Exhaustion constant({{1, 2}, {1, 2}, {1, 2}});
  for (const auto& p : measure_convergence_sweep(path, 0, constant)) CHECK(p.distance == 0.0);

  SpectralMeasure a, b;
  a.atoms = {{0.0, 0.5}, {1.0, 0.5}};
  b.atoms = {{0.5, 1.0}};
  CHECK(kolmogorov_distance(a, b) == doctest::Approx(0.5));
  CHECK(kolmogorov_distance(a, a) == 0.0);

  const auto long_path = generate(spec(FamilyKind::UnitPath, 22));
  const auto sweep = measure_convergence_sweep(long_path, 0, Exhaustion::intervals(1, 2, 20));
  CHECK(sweep.size() == 18);
  CHECK_THROWS_AS(exhaustion_measures(path, 0, Exhaustion::intervals(1, 2, 9)), Error);
}

TEST_CASE("compressions converge along the exhaustion") {
  const auto path = generate(spec(FamilyKind::UnitPath, 10));
  const Exhaustion ex = Exhaustion::intervals(1, 2, 9);
  Eigen::VectorXd one(1);
  one << 1.0;
  const auto points = compression_limit_residual(path, 0, ex, {2}, one);
  for (const auto& p : points) CHECK(p.identity_residual < 1e-10);
  // F_2 = {1, 2} misses vertex 3 next to the support.
  CHECK(points.front().limit_residual > 0.1);
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].limit_residual <= points[i - 1].limit_residual + 1e-10);
  CHECK(points.back().limit_residual < 1e-10);

  Eigen::VectorXd diff(2);
  diff << 1.0, -1.0;
  for (const auto& p : compression_limit_residual(path, 0, ex, {1, 2}, diff)) CHECK(p.identity_residual < 1e-10);
  CHECK_THROWS_AS(compression_limit_residual(path, 0, ex, {5}, one), Error);
}

TEST_CASE("balanced intertwining") {
  const auto path = generate(spec(FamilyKind::UnitPath, 6));
  const std::vector<Index> f = {1, 2, 3, 4, 5};
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(5);
  xi(0) = 1.0;
  xi(2) = -1.0;
  IntertwiningResidual r = balanced_intertwining_residual(path, 0, f, xi);
  CHECK(r.laplacian < 1e-10);
  CHECK(r.gram < 1e-10);
  CHECK_THROWS_AS(balanced_intertwining_residual(path, 0, f, Eigen::VectorXd::Unit(5, 0)), Error);

  std::uint64_t state = 12345;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd b(5);
    for (int i = 0; i < 5; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      b(i) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    b.array() -= b.mean();
    r = balanced_intertwining_residual(path, 0, f, b);
    CHECK(r.laplacian < 1e-10);
    CHECK(r.gram < 1e-10);
  }
}

TEST_CASE("spectral gap estimate") {
  const auto pair = build_network(std::vector<Edge>{{0, 1, 1.0}}, 0);
  CHECK(std::isinf(spectral_gap_estimate(pair, 0, {1}).alpha));

  // Sample the unit circle of the balanced plane of the min-kernel.
  const auto path = generate(spec(FamilyKind::UnitPath, 4));
  const Eigen::MatrixXd m = gram_matrix(path, 0, {1, 2, 3}).entries;
  Eigen::Vector3d e1(1, -1, 0), e2(1, 1, -2);
  e1.normalize();
  e2.normalize();
  double worst = 0.0;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i) {
    const double theta = std::numbers::pi * i / samples;
    const Eigen::Vector3d xi = std::cos(theta) * e1 + std::sin(theta) * e2;
    worst = std::max(worst, xi.dot(m * xi));
  }
  const SpectralGap gap = spectral_gap_estimate(path, 0, {1, 2, 3});
  CHECK(gap.alpha == doctest::Approx(1.0 / worst).epsilon(1e-8));
  CHECK(gap.inverse_norm <= gap.alpha);

  // Zero padding nests the balanced planes, so alpha cannot grow with k. The
  // form equals Σ_{m≥1} 2^{-m} (ξ_1+...+ξ_m)^2 ≤ Σ m 2^{-m} ‖ξ‖² < 2‖ξ‖².
  double previous = std::numeric_limits<double>::infinity();
  const auto geo = generate(spec(FamilyKind::GeometricHalfline, 14));
  for (Index k = 2; k < 14; ++k) {
    std::vector<Index> f;
    for (Index x = 1; x <= k; ++x) f.push_back(x);
    const double alpha = spectral_gap_estimate(geo, 0, f).alpha;
    CHECK(alpha > 0.5);
    CHECK(alpha <= previous + 1e-9);
    previous = alpha;
  }
}
