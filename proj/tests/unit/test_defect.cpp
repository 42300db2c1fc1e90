#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "netlap/defect.hpp"
#include "netlap/error.hpp"
#include "netlap/fixtures.hpp"

using namespace netlap;

namespace {

// u from the eigen-equation itself, solved forward:
// u(n+1) = u(n) + (b^n (u(n) - u(n-1)) + u(n)) / b^{n+1}.
std::vector<ExactRational> forward_solution(const ExactRational& b, Index n_max) {
  std::vector<ExactRational> u = {1};
  ExactRational bn = 1;
  for (Index n = 0; n < n_max; ++n) {
    const ExactRational left = n == 0 ? ExactRational(0) : ExactRational(bn * (u[n] - u[n - 1]));
    ExactRational next = u[n] + (left + u[n]) / (bn * b);
    next.canonicalize();
    u.push_back(next);
    bn *= b;
  }
  return u;
}

}  // namespace

TEST_CASE("defect recursion reproduces the published fractions") {
  const DefectSeries s = defect_recursion(2, 9);
  const DefectFixtures& fx = defect_fixtures_b2();
  REQUIRE(fx.fractions.size() == 9);
  for (const auto& f : fx.fractions) CHECK(s.psi[f.n] == f.value);
  for (const auto& d : fx.decimals) {
    if (d.n <= 9) CHECK(to_decimal(s.psi[d.n], 4) == pad_decimal(d.text, 4));
  }
}

TEST_CASE("defect recursion agrees with the forward eigen-equation solve") {
  for (const ExactRational& b : {ExactRational(2), ExactRational(3), ExactRational(5, 2), ExactRational(10)}) {
    const DefectSeries s = defect_recursion(b, 40);
    const auto u = forward_solution(b, 40);
    for (Index n = 0; n <= 40; ++n) CHECK(s.psi[n] == u[n]);
    CHECK(s.phi[1] == 1);
    CHECK(s.psi[1] == 1 + 1 / b);
  }
  CHECK_THROWS_AS(defect_recursion(1, 5), Error);
  CHECK_THROWS_AS(defect_recursion(ExactRational(1, 2), 5), Error);
}

TEST_CASE("phi_3 for b = 2") {
  const DefectSeries s = defect_recursion(2, 3);
  CHECK(s.phi[2] == ExactRational(5, 2));
  CHECK(s.phi[3] == ExactRational(5, 2) + ExactRational(17, 8));
  CHECK(s.phi[3] == ExactRational(37, 8));
}

TEST_CASE("eigen equation holds exactly") {
  CHECK(verify_eigen_equation(defect_recursion(2, 1)).holds);
  const EigenEquationCheck c = verify_eigen_equation(defect_recursion(3, 50));
  CHECK(c.holds);
  CHECK(c.checked == 50);
  CHECK(c.max_residual == 0.0);

  DefectSeries tampered = defect_recursion(2, 10);
  tampered.psi[6] += ExactRational(1, 1000000);
  const EigenEquationCheck t = verify_eigen_equation(tampered);
  CHECK_FALSE(t.holds);
  CHECK(t.first_failure == 5);

  CHECK_THROWS_AS(verify_eigen_equation(defect_recursion(2, 0)), Error);
  CHECK_THROWS_AS(verify_eigen_equation(defect_recursion(2, 20, 10)), Error);
}

TEST_CASE("growth exponent") {
  CHECK(growth_exponent(2.0) == 2);
  CHECK(growth_exponent(std::exp(2.0)) == 2);
  CHECK(growth_exponent(1000.0) == 2);
  const double b = 1.01;
  const int m = growth_exponent(b);
  const double target = std::pow(2.0 / (std::numbers::e * std::log(b)), 2);
  CHECK(m * (m - 1.0) >= target);
  CHECK((m - 1.0) * (m - 2.0) < target);
  CHECK(std::abs(m - 2.0 / (std::numbers::e * std::log(b))) < 2.0);
  CHECK_THROWS_AS(growth_exponent(1.0), Error);
}

TEST_CASE("growth bounds") {
  const DefectSeries s = defect_recursion(2, 60);
  const GrowthCertificate cert = verify_growth_bounds(s, 2);
  CHECK(cert.all());
  CHECK(cert.phi_ok[0]);  // φ_1 = 1 <= 1
  CHECK(s.phi[3] <= 9);
  CHECK(s.psi[2] <= 5);
  const GrowthCertificate loose = verify_growth_bounds(defect_recursion(ExactRational(11, 10), 80), growth_exponent(1.1));
  CHECK(loose.all());
}

TEST_CASE("tail majorant bounds the explicit sum") {
  for (const auto& [r, n, p] : {std::tuple{0.5, 10, 2}, std::tuple{0.5, 30, 4}, std::tuple{0.9, 5, 3}}) {
    long double explicit_sum = 0.0L;
    for (int k = n + 1; k < 20000; ++k) explicit_sum += std::pow(static_cast<long double>(r), k) * std::pow(static_cast<long double>(k), p);
    const double bound = polynomial_geometric_tail(r, static_cast<Index>(n), p);
    CHECK(bound >= static_cast<double>(explicit_sum));
    CHECK(bound < 3.0 * static_cast<double>(explicit_sum));
  }
}

TEST_CASE("defect energy") {
  const DefectEnergy e = defect_energy(defect_recursion(2, 80));
  CHECK(e.partial_sums[1] == 0.5);
  for (std::size_t n = 2; n < e.partial_sums.size(); ++n) CHECK(e.partial_sums[n] >= e.partial_sums[n - 1]);
  CHECK(std::abs(e.partial_sums[60] - e.partial_sums[80]) < 5e-7);
  CHECK(e.tail_bound < 1e-15);
  CHECK(defect_energy(defect_recursion(2, 0)).partial_sums.back() == 0.0);
}

TEST_CASE("certified limit") {
  const DefectLimit lim = defect_limit(2, 1e-6);
  CHECK(std::abs(lim.estimate - defect_fixtures_b2().limit) < 1e-6);
  CHECK(lim.half_width < 1e-6);
  CHECK(lim.bounds.contains(4.044682812009144));

  const DefectLimit coarse = defect_limit(2, 1e-2);
  CHECK(std::abs(coarse.estimate - 4.04) < 1e-2);

  const DefectSeries s = defect_recursion(2, 12);
  CHECK(first_index_exceeding(s, 4) == 10);
  CHECK(std::abs(s.u(10) - 4.0080) < 1e-4);
  // The printed 4.0080 is a truncation; rounding gives 4.0081.
  CHECK(to_decimal(s.psi[10], 4) == "4.0081");
  CHECK(to_decimal(s.psi[10], 6) == "4.008082");

  const DefectLimit ten = defect_limit(10, 1e-8);
  CHECK(ten.estimate < lim.estimate);
  CHECK(ten.bounds.width() < 1e-8);
  const DefectSeries s10 = defect_recursion(10, 40);
  CHECK(ten.bounds.contains(s10.u(40)));
}

TEST_CASE("enclosure mode brackets the exact values") {
  const DefectSeries exact = defect_recursion(3, 60);
  const DefectSeries boxed = defect_recursion(3, 60, 10);
  CHECK_FALSE(boxed.exact);
  for (Index n = 0; n <= 60; ++n) {
    const double lo = boxed.u_bounds(n).lower, hi = boxed.u_bounds(n).upper;
    CHECK(ExactRational(lo) <= exact.psi[n]);
    CHECK(exact.psi[n] <= ExactRational(hi));
    CHECK(hi - lo < 1e-12);
  }
}

TEST_CASE("l2 probe") {
  FamilySpec geo;
  geo.kind = FamilyKind::GeometricHalfline;
  geo.ratio = 2;
  const L2Probe p = l2_defect_probe(geo, 200);
  CHECK(p.values[1] == 1.5);
  for (Index n = 0; n <= 20; ++n) CHECK(p.values[n] == doctest::Approx(defect_recursion(2, 20).u(n)));
  for (std::size_t n = 1; n < p.partial_norms.size(); ++n) {
    CHECK(p.partial_norms[n] > p.partial_norms[n - 1]);
    CHECK(p.partial_norms[n] >= static_cast<double>(n + 1));
  }

  FamilySpec path;
  path.kind = FamilyKind::UnitPath;
  const L2Probe q = l2_defect_probe(path, 2);
  REQUIRE(q.partial_norms.size() == 3);
  CHECK(q.values[1] == 2.0);
  CHECK(q.values[2] == 5.0);
  CHECK(q.partial_norms[2] > q.partial_norms[1]);
  const L2Probe far = l2_defect_probe(path, 2000);
  CHECK(std::isinf(far.partial_norms.back()));
  CHECK(far.log10_partial_norms.back() > 300.0);

  const auto net = generate(FamilySpec{FamilyKind::GeometricHalfline, 12, 2, 0});
  const L2Probe from_net = l2_defect_probe(net);
  CHECK(from_net.values.size() == 12);
  CHECK(from_net.values[11] == doctest::Approx(p.values[11]));

  FamilySpec tree;
  tree.kind = FamilyKind::BinaryTree;
  CHECK_THROWS_AS(l2_defect_probe(tree, 5), Error);
  CHECK_THROWS_AS(l2_defect_probe(generate(FamilySpec{FamilyKind::BinaryTree, 2, 2, 0})), Error);
}

TEST_CASE("defect exports") {
  std::ostringstream os;
  write_defect_csv(os, defect_recursion(2, 2), 4);
  CHECK(os.str() == "n,numerator,denominator,decimal\n0,1,1,1.0000\n1,3,2,1.5000\n2,17,8,2.1250\n");
  std::ostringstream plot;
  write_defect_plot(plot, defect_recursion(2, 1));
  CHECK(plot.str() == "x,u\n0,1\n1,1.5\n");
}
