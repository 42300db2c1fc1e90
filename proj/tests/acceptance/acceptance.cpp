// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the netlap
// executable, used for the determinism check.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netlap/defect.hpp"
#include "netlap/dipole.hpp"
#include "netlap/fixtures.hpp"
#include "netlap/format.hpp"
#include "netlap/heat.hpp"
#include "netlap/random.hpp"
#include "netlap/reciprocity.hpp"

using namespace netlap;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  double budget_ms = 0.0;  // 0 means no runtime bound
};

struct Corpus {
  std::string name;
  ResistanceNetwork net;
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

FamilySpec spec(FamilyKind kind, Index size, std::uint64_t seed = 0) {
  FamilySpec s;
  s.kind = kind;
  s.size = size;
  s.seed = seed;
  return s;
}

std::vector<Corpus> corpus() {
  std::vector<Corpus> out;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Index n = 3 + static_cast<Index>(seed % 10);
    out.push_back({"random_weighted(n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")",
                   generate(spec(FamilyKind::RandomWeighted, n, seed))});
  }
  for (Index n = 3; n <= 16; ++n) {
    out.push_back({"unit_path(" + std::to_string(n) + ")", generate(spec(FamilyKind::UnitPath, n))});
    out.push_back({"geometric(2, " + std::to_string(n) + ")", generate(spec(FamilyKind::GeometricHalfline, n))});
  }
  return out;
}

// Reduced Laplacian from the edge list alone, inverted by full-pivot LU.
Eigen::MatrixXd oracle_green(const ResistanceNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u), v = static_cast<Eigen::Index>(e.v);
    lap(u, u) += e.c;
    lap(v, v) += e.c;
    lap(u, v) -= e.c;
    lap(v, u) -= e.c;
  }
  const auto o = static_cast<Eigen::Index>(net.origin());
  Eigen::MatrixXd reduced(n - 1, n - 1);
  for (Eigen::Index i = 0, ri = 0; i < n; ++i) {
    if (i == o) continue;
    for (Eigen::Index j = 0, rj = 0; j < n; ++j) {
      if (j == o) continue;
      reduced(ri, rj++) = lap(i, j);
    }
    ++ri;
  }
  return reduced.fullPivLu().inverse();
}

Eigen::VectorXd random_vector(SplitMix64& rng, Index n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 2.0 * rng.uniform() - 1.0;
  return v;
}

void fail(Outcome& out, const std::string& what) {
  if (out.pass) out.detail = what;
  out.pass = false;
}

Outcome criterion_1() {
  Outcome out{true, "", 1.0};
  const auto& fx = defect_fixtures_b2();
  const DefectSeries s = defect_recursion(2, 9);
  for (const auto& f : fx.fractions) {
    if (to_string(s.psi[f.n]) != to_string(f.value)) fail(out, "u(" + std::to_string(f.n) + ") = " + to_string(s.psi[f.n]));
  }
  int decimals = 0;
  for (const auto& d : fx.decimals) {
    if (d.n > 9) continue;
    const int places = printed_places(d.text);
    const std::string mine = to_decimal(s.psi[d.n], places);
    if (mine != d.text) fail(out, "decimal u(" + std::to_string(d.n) + ") = " + mine + ", printed " + d.text);
    ++decimals;
  }
  if (out.pass) {
    out.detail = std::to_string(fx.fractions.size()) + " fractions and " + std::to_string(decimals) + " decimals match";
  }
  return out;
}

Outcome criterion_2() {
  Outcome out{true, "", 10.0};
  const auto& fx = defect_fixtures_b2();
  const DefectLimit lim = defect_limit(2, 1e-6);
  const Index first = first_index_exceeding(defect_recursion(2, 20), fx.threshold);
  if (!(std::abs(lim.estimate - fx.limit) <= 1e-6)) fail(out, "estimate " + format_double(lim.estimate));
  if (!(lim.half_width <= 1e-6) || !std::isfinite(lim.tail_bound)) fail(out, "tail bound not certified");
  if (!lim.bounds.contains(fx.limit)) fail(out, "enclosure misses the published value");
  if (first != fx.first_exceeding) fail(out, "first index above 4 is " + std::to_string(first));
  if (out.pass) {
    std::ostringstream os;
    os << "u(inf) = " << format_double(lim.estimate) << " +- " << format_double(lim.half_width) << " (N=" << lim.n_used
       << "), first n with u(n) > 4 is " << first;
    out.detail = os.str();
  }
  return out;
}

Outcome criterion_3() {
  Outcome out{true, "", 1000.0};
  const std::array<ExactRational, 4> ratios = {ExactRational(2), ExactRational(3), ExactRational(5, 2),
                                               ExactRational(10)};
  for (const auto& b : ratios) {
    const EigenEquationCheck check = verify_eigen_equation(defect_recursion(b, 200));
    if (!check.holds || check.checked != 200) fail(out, "b = " + to_string(b) + " fails");
  }
  if (out.pass) out.detail = "exact equality for b in {2, 3, 5/2, 10}, N = 200";
  return out;
}

Outcome criterion_4(const std::vector<Corpus>& nets) {
  Outcome out{true, "", 30000.0};
  double worst_rec = 0.0, worst_onb = 0.0, worst_green = 0.0;
  for (const auto& c : nets) {
    const auto& net = c.net;
    const auto f = all_but(net, net.origin());
    const ReciprocityReport r = verify_reciprocity(net, net.origin(), f);
    worst_rec = std::max(worst_rec, r.residual);
    worst_onb = std::max(worst_onb, r.orthonormality);
    if (!(r.residual < 1e-8) || !(r.orthonormality < 1e-8)) fail(out, c.name + " reciprocity");
    for (Index x : f) {
      for (Index y : f) {
        const double g = green_identity_residual(net, net.origin(), x, y).residual;
        worst_green = std::max(worst_green, g);
        if (!(g < 1e-8)) fail(out, c.name + " Green identity");
      }
    }
  }
  std::ostringstream os;
  os << nets.size() << " networks; max residuals: reciprocity " << format_double(worst_rec) << ", orthonormality "
     << format_double(worst_onb) << ", Green " << format_double(worst_green);
  if (out.pass) out.detail = os.str();
  else out.detail += "; " + os.str();
  return out;
}

Outcome criterion_5(const std::vector<Corpus>& nets) {
  Outcome out{true, "", 0.0};
  double worst = 0.0;
  for (const auto& c : nets) {
    const auto& net = c.net;
    const GramMatrix gram = gram_matrix(net, net.origin(), all_but(net, net.origin()));
    const Eigen::MatrixXd green = oracle_green(net);
    const double diff = (gram.entries - green).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    if (!(diff < 1e-8)) fail(out, c.name);
  }
  for (Index n = 3; n <= 16; ++n) {
    const auto path = generate(spec(FamilyKind::UnitPath, n));
    const GramMatrix gram = gram_matrix(path, 0, all_but(path, 0));
    for (std::size_t i = 0; i < gram.index_order.size(); ++i) {
      for (std::size_t j = 0; j < gram.index_order.size(); ++j) {
        const double expected = static_cast<double>(std::min(gram.index_order[i], gram.index_order[j]));
        const double diff = std::abs(gram.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expected);
        worst = std::max(worst, diff);
        if (!(diff < 1e-8)) fail(out, "unit_path(" + std::to_string(n) + ") min kernel");
      }
    }
  }
  if (out.pass) out.detail = "max |M - L_o^{-1}| and |M - min(x,y)| = " + format_double(worst);
  return out;
}

Outcome criterion_6(const std::vector<Corpus>& nets) {
  Outcome out{true, "", 0.0};
  double worst = 0.0;
  for (const auto& c : nets) {
    const auto& net = c.net;
    const EigenSystem eigen = diagonalize_gram(gram_matrix(net, net.origin(), all_but(net, net.origin())));
    const double residual = expectation_identity_residual(eigen);
    worst = std::max(worst, residual);
    if (!(residual < 1e-12)) fail(out, c.name + " expectation identity " + format_double(residual));
    const ProjectionNormBounds b = projection_norm_bounds(eigen);
    if (!(b.lower < b.value && b.value < b.upper)) fail(out, c.name + " sandwich not strict");
  }
  if (out.pass) out.detail = "max identity residual " + format_double(worst) + ", sandwich strict on all";
  return out;
}

Outcome criterion_7(const std::vector<Corpus>& nets) {
  Outcome out{true, "", 0.0};
  SplitMix64 rng(7);
  double worst = 0.0, worst_balanced = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& c = nets[static_cast<std::size_t>(trial) % nets.size()];
    const auto f = all_but(c.net, c.net.origin());
    const Eigen::VectorXd xi = random_vector(rng, f.size());
    const SpanEnergy e = span_energy(c.net, c.net.origin(), f, xi);
    const double direct = xi.squaredNorm() + xi.sum() * xi.sum();
    const double diff = std::max(std::abs(e.quadratic - direct), std::abs(e.coefficient - direct));
    worst = std::max(worst, diff);
    if (!(diff < 1e-10)) fail(out, c.name + " quadratic form " + format_double(diff));

    Eigen::VectorXd balanced = xi.array() - xi.mean();
    const IntertwiningResidual r = balanced_intertwining_residual(c.net, c.net.origin(), f, balanced);
    worst_balanced = std::max(worst_balanced, r.laplacian);
    if (!(r.laplacian < 1e-10)) fail(out, c.name + " balanced form " + format_double(r.laplacian));
  }
  if (out.pass) {
    out.detail = "1000 vectors; max residual " + format_double(worst) + ", balanced " + format_double(worst_balanced);
  }
  return out;
}

Outcome criterion_8() {
  Outcome out{true, "", 0.0};
  const DefectLimit lim = defect_limit(2, 1e-6);
  if (!std::isfinite(lim.bounds.upper)) fail(out, "defect vector not bounded");
  if (!verify_eigen_equation(defect_recursion(2, 200)).holds) fail(out, "Δu = -u fails");

  // A strictly increasing sequence bounded below by N + 1 grows at least linearly.
  for (FamilyKind kind : {FamilyKind::GeometricHalfline, FamilyKind::UnitPath}) {
    const L2Probe probe = l2_defect_probe(spec(kind, 0), 10000);
    for (std::size_t n = 0; n < probe.log10_partial_norms.size(); ++n) {
      if (!(probe.log10_partial_norms[n] >= std::log10(static_cast<double>(n + 1)) - 1e-12)) {
        fail(out, std::string(family_name(kind)) + " probe below linear growth at N = " + std::to_string(n));
        break;
      }
      if (n > 0 && !(probe.log10_partial_norms[n] > probe.log10_partial_norms[n - 1])) {
        fail(out, std::string(family_name(kind)) + " probe not increasing at N = " + std::to_string(n));
        break;
      }
    }
  }

  const auto geo = generate(spec(FamilyKind::GeometricHalfline, 17));
  const GrowthReport g = off_diagonal_growth(MatrixLaplacianView::from_network(geo), Exhaustion::intervals(0, 0, 15));
  for (std::size_t i = 0; i < g.k.size(); ++i) {
    if (g.norms[i] != std::ldexp(1.0, static_cast<int>(g.k[i]) + 1)) fail(out, "geometric norm at k = " + std::to_string(g.k[i]));
  }
  if (g.verdict != TrendVerdict::Inconclusive) fail(out, "geometric verdict " + verdict_name(g.verdict));
  const auto path = generate(spec(FamilyKind::UnitPath, 17));
  const GrowthReport p = off_diagonal_growth(MatrixLaplacianView::from_network(path), Exhaustion::intervals(0, 0, 15));
  if (p.verdict != TrendVerdict::CriterionMet) fail(out, "unit_path verdict " + verdict_name(p.verdict));
  if (out.pass) {
    out.detail = "u bounded by " + format_double(lim.bounds.upper) +
                 ", probe norms grow at least linearly to N = 10000, growth verdicts inconclusive / criterion_met";
  }
  return out;
}

Outcome criterion_9() {
  Outcome out{true, "", 60000.0};
  std::vector<Corpus> nets = {{"unit_path(32)", generate(spec(FamilyKind::UnitPath, 32))},
                              {"geometric(2, 32)", generate(spec(FamilyKind::GeometricHalfline, 32))},
                              {"random_weighted(12)", generate(spec(FamilyKind::RandomWeighted, 12, 3))},
                              {"binary_tree(4)", generate(spec(FamilyKind::BinaryTree, 4))},
                              {"complete(8)", generate(spec(FamilyKind::Complete, 8))}};
  SplitMix64 rng(9);
  double worst_comp = 0.0, worst_ratio_gap = 0.0;
  for (const auto& c : nets) {
    for (TruncationMode mode : {TruncationMode::Full, TruncationMode::DirichletInterior}) {
      std::vector<Index> f;
      if (mode == TruncationMode::DirichletInterior) {
        for (Index x = 0; x + 1 < c.net.size(); ++x) f.push_back(x);
      }
      const HeatSemigroup sg(c.net, mode, f);
      if (sg.kernel(0.0).kernel != Eigen::MatrixXd::Identity(sg.dimension(), sg.dimension())) {
        fail(out, c.name + " p_0 != I");
      }
      const Eigen::VectorXd u = random_vector(rng, sg.dimension());
      for (const auto& [s, t] : std::vector<std::pair<double, double>>{{0.1, 0.2}, {0.5, 0.5}, {1.0, 2.5}}) {
        const SemigroupResiduals r = semigroup_checks(sg, s, t, u);
        worst_comp = std::max(worst_comp, r.composition);
        if (!(r.composition < 1e-10)) fail(out, c.name + " composition " + format_double(r.composition));
        if (r.contraction > 0.0) fail(out, c.name + " not contractive");
      }
      // First-order difference quotient: halving h halves the error.
      const double h = 1e-3 / std::max(1.0, sg.eigenvalues().cwiseAbs().maxCoeff());
      const double ratio = generator_halving_ratio(sg, h, u);
      worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 0.5) / 0.5);
      if (!(std::abs(ratio - 0.5) <= 0.05)) fail(out, c.name + " halving ratio " + format_double(ratio));
    }
  }
  const MassSequence complete = stochastic_mass(spec(FamilyKind::UnitPath, 0), 1, 40, 1.0, 0);
  if (!(complete.mass.back() >= 0.999)) fail(out, "unit_path mass at k = 40 is " + format_double(complete.mass.back()));
  FamilySpec geo = spec(FamilyKind::GeometricHalfline, 0);
  const MassSequence incomplete = stochastic_mass(geo, 1, 40, 1.0, 0);
  const std::size_t last = incomplete.mass.size() - 1;
  const double step = std::abs(incomplete.mass[last] - incomplete.mass[last - 1]);
  if (!(step < 1e-6)) fail(out, "geometric masses still moving by " + format_double(step));
  if (!(incomplete.mass[last] < 1.0 - 1e-3)) fail(out, "geometric mass " + format_double(incomplete.mass[last]));
  if (out.pass) {
    std::ostringstream os;
    os << "composition <= " << format_double(worst_comp) << ", halving ratio within "
       << format_double(100.0 * worst_ratio_gap) << "%; unit_path mass " << format_double(complete.mass.back())
       << " at k=40; geometric mass settles at " << format_double(incomplete.mass[last])
       << " (numerical evidence of incompleteness)";
    out.detail = os.str();
  }
  return out;
}

std::string run_capture(const std::string& command) {
  std::string output;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) output.append(buffer.data(), got);
  const int status = pclose(pipe);
  return output + "\n<status " + std::to_string(status) + ">";
}

Outcome criterion_10(const std::string& exe) {
  Outcome out{true, "", 0.0};
  if (exe.empty()) {
    fail(out, "no netlap executable given");
    return out;
  }
  const auto dir = std::filesystem::temp_directory_path() / "netlap_acceptance";
  std::filesystem::create_directories(dir);
  const auto file = dir / "net.json";
  std::ofstream(file) << R"({"vertices": [0, 1, 2, 3], "edges": [{"u": 0, "v": 1, "c": 1.5}, )"
                         R"({"u": 1, "v": 2, "c": 0.25}, {"u": 2, "v": 3, "c": 4}, {"u": 3, "v": 0, "c": 1}], "origin": 0})"
                      << '\n';
  const std::vector<std::string> commands = {
      "validate --network " + file.string(),
      "validate --generator random_weighted --n 9 --seed 4",
      "reciprocity --generator random_weighted --n 10 --seed 5",
      "reciprocity --network " + file.string(),
      "defect --b 5/2 --n 30",
      "defect --b 2 --limit --tol 1e-6",
      "defect --b 2 --n 40 --plot",
      "heat --generator geometric --b 2 --t 1 --x 0",
      "measure --generator geometric --b 2 --kmax 15",
      "growth --generator geometric --b 2",
      "gram --generator random_weighted --n 8 --seed 6",
      "dipole --generator unit_path --n 10 --x 4",
      "probe --generator geometric --b 2 --n 200",
  };
  int runs = 0;
  for (const auto& args : commands) {
    for (const char* format : {"csv", "json"}) {
      const std::string command = "\"" + exe + "\" " + args + " --format " + format;
      const std::string first = run_capture(command);
      const std::string second = run_capture(command);
      if (first != second) fail(out, "output differs: " + args + " --format " + format);
      runs += 2;
    }
  }
  std::filesystem::remove_all(dir);
  if (out.pass) out.detail = std::to_string(runs) + " runs over every subcommand, byte-identical in pairs";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  const std::vector<Corpus> nets = corpus();
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion_1},
      {2, criterion_2},
      {3, criterion_3},
      {4, [&] { return criterion_4(nets); }},
      {5, [&] { return criterion_5(nets); }},
      {6, [&] { return criterion_6(nets); }},
      {7, [&] { return criterion_7(nets); }},
      {8, criterion_8},
      {9, criterion_9},
      {10, [&] { return criterion_10(exe); }},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double ms = elapsed_ms(start);
    if (out.budget_ms > 0.0 && ms >= out.budget_ms) {
      out.detail += "; runtime over budget";
      out.pass = false;
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f ms", ms);
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << out.detail << " [" << timing;
    if (out.budget_ms > 0.0) std::cout << " / budget " << out.budget_ms << " ms";
    std::cout << "]\n";
    failures += out.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << '\n';
  return failures == 0 ? 0 : 1;
}
