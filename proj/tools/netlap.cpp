// netlap: command-line driver over the netlap library.
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
// parse or I/O errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netlap/defect.hpp"
#include "netlap/dipole.hpp"
#include "netlap/error.hpp"
#include "netlap/fixtures.hpp"
#include "netlap/format.hpp"
#include "netlap/heat.hpp"
#include "netlap/io.hpp"
#include "netlap/network.hpp"
#include "netlap/reciprocity.hpp"

namespace {

using namespace netlap;
using Json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string network_path;
  std::string generator;
  std::string b = "2";
  std::optional<Index> n;
  std::optional<std::string> origin;
  std::optional<Index> k_min;
  std::optional<Index> k_max;
  std::optional<double> tolerance;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  // subcommand specific
  double t = 1.0;
  std::optional<std::string> x;
  bool check_paper = false;
  bool limit = false;
  bool plot = false;
};

double tolerance_or(const RunConfig& cfg, double fallback) {
  const double tol = cfg.tolerance.value_or(fallback);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "--tol must be positive");
  return tol;
}

FamilySpec family_spec(const RunConfig& cfg, Index default_size) {
  const auto kind = family_from_name(cfg.generator);
  if (!kind) throw Error(ErrorCode::InvalidParameter, "unknown generator \"" + cfg.generator + "\"");
  FamilySpec spec;
  spec.kind = *kind;
  spec.size = cfg.n.value_or(default_size);
  spec.ratio = parse_rational(cfg.b);
  spec.seed = cfg.seed;
  return spec;
}

ResistanceNetwork load_network(const RunConfig& cfg, Index default_size) {
  if (!cfg.network_path.empty() && !cfg.generator.empty()) {
    throw Error(ErrorCode::InvalidParameter, "--network and --generator are exclusive");
  }
  if (!cfg.network_path.empty()) return to_network(read_network_file(cfg.network_path));
  if (cfg.generator.empty()) throw Error(ErrorCode::InvalidParameter, "give --network FILE or --generator NAME");
  return generate(family_spec(cfg, default_size));
}

Index vertex_by_label(const ResistanceNetwork& net, const std::string& label) {
  const auto found = net.find_label(label);
  if (!found) throw Error(ErrorCode::InvalidParameter, "no vertex \"" + label + "\"");
  return *found;
}

Index resolve_origin(const ResistanceNetwork& net, const RunConfig& cfg) {
  return cfg.origin ? vertex_by_label(net, *cfg.origin) : net.origin();
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + cfg.out);
  file << text;
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + cfg.out);
}

bool json_output(const RunConfig& cfg) { return cfg.format == "json"; }

Json number(double value) {
  return std::isfinite(value) ? Json(value) : Json(format_double(value));
}

// Sets F_k made of the first k non-origin vertices.
std::vector<std::vector<Index>> growing_sets(const ResistanceNetwork& net, Index origin, Index k_min, Index k_max) {
  const std::vector<Index> others = all_but(net, origin);
  if (k_min < 1 || k_max < k_min) throw Error(ErrorCode::InvalidParameter, "need 1 <= kmin <= kmax");
  if (k_max > others.size()) throw Error(ErrorCode::TruncationTooSmall, "kmax exceeds the number of vertices");
  std::vector<std::vector<Index>> sets;
  for (Index k = k_min; k <= k_max; ++k) sets.emplace_back(others.begin(), others.begin() + static_cast<long>(k));
  return sets;
}

int cmd_validate(const RunConfig& cfg) {
  const double tol = tolerance_or(cfg, kDefaultTolerance);
  std::vector<ResidualRecord> records;
  Json problems = Json::array();
  bool ok = true;

  MatrixLaplacianView view;
  std::vector<std::string> labels;
  if (!cfg.network_path.empty()) {
    const NetworkDocument doc = read_network_file(cfg.network_path);
    labels = doc.labels;
    for (const auto& e : doc.edges) {
      if (e.u == e.v) {
        problems.push_back({{"problem", "self_loop"}, {"u", labels[e.u]}, {"v", labels[e.v]}, {"c", number(e.c)}});
        ok = false;
      } else if (e.c < 0.0 || !std::isfinite(e.c)) {
        problems.push_back({{"problem", "negative_conductance"}, {"u", labels[e.u]}, {"v", labels[e.v]}, {"c", number(e.c)}});
        ok = false;
      }
    }
    view = to_matrix_view(doc);
    try {
      (void)to_network(doc);
    } catch (const Error& e) {
      problems.push_back({{"problem", std::string(to_string(e.code()))}, {"message", e.what()}});
      ok = false;
    }
  } else {
    const ResistanceNetwork net = load_network(cfg, 16);
    labels = net.labels();
    view = MatrixLaplacianView::from_network(net);
  }

  const auto violations = validate_matrix_laplacian(view, tol);
  for (const auto& v : violations) {
    problems.push_back({{"problem", std::string(condition_name(v.condition))},
                        {"row", labels[v.row]},
                        {"col", labels[v.col]},
                        {"value", number(v.value)}});
  }
  ok = ok && violations.empty();
  records.push_back(make_record("matrix_laplacian_violations", static_cast<double>(violations.size()), 0.0));

  if (view.size() > 0) {
    const auto minors = principal_minor_check(view, Exhaustion::intervals(0, 0, view.size() - 1));
    double worst = 0.0;
    for (std::size_t k = 0; k < minors.size(); ++k) {
      double scale = 1.0;
      for (Index i = 0; i <= k; ++i) scale *= std::max(1.0, std::abs(view.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
      worst = std::max(worst, -minors[k] / scale);
    }
    records.push_back(make_record("principal_minor_negativity", std::max(0.0, worst), tol));
    ok = ok && records.back().pass;
  }

  std::ostringstream os;
  if (json_output(cfg)) {
    Json checks = Json::array();
    for (const auto& r : records) {
      checks.push_back({{"check_name", r.check_name}, {"value", number(r.value)}, {"tolerance", r.tolerance}, {"pass", r.pass}});
    }
    const Json doc = {{"pass", ok}, {"checks", checks}, {"problems", problems}};
    os << doc.dump(2) << '\n';
  } else {
    os << "check_name,value,tolerance,pass\n";
    for (const auto& r : records) {
      os << r.check_name << ',' << format_double(r.value) << ',' << format_double(r.tolerance) << ','
         << (r.pass ? "true" : "false") << '\n';
    }
    for (const auto& p : problems) {
      std::string where;
      if (p.contains("u")) where = p["u"].get<std::string>() + "-" + p["v"].get<std::string>();
      if (p.contains("row")) where = p["row"].get<std::string>() + "-" + p["col"].get<std::string>();
      os << p["problem"].get<std::string>() << (where.empty() ? "" : ":" + where) << ",,,false\n";
    }
  }
  emit(cfg, os.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_reciprocity(const RunConfig& cfg) {
  const double tol = tolerance_or(cfg, 1e-8);
  const ResistanceNetwork net = load_network(cfg, 12);
  const Index origin = resolve_origin(net, cfg);
  const Index others = net.size() - 1;
  const auto sets = growing_sets(net, origin, cfg.k_min.value_or(1), cfg.k_max.value_or(others));

  Json rows = Json::array();
  std::ostringstream csv;
  csv << "k,reciprocity,orthonormality,expectation_identity,green_identity,pass\n";
  bool ok = true;
  for (const auto& set : sets) {
    const ReciprocityReport report = verify_reciprocity(net, origin, set);
    const EigenSystem eigen = diagonalize_gram(gram_matrix(net, origin, set));
    const double expectation = expectation_identity_residual(eigen);
    double green = 0.0;
    DipoleSolver solver(net, origin);
    const Eigen::MatrixXd members = solver.solve_all(set);
    for (Eigen::Index j = 0; j < members.cols(); ++j) {
      const VertexFunction lap = apply_laplacian(net, VertexFunction(members.col(j))).values;
      for (Eigen::Index i = 0; i < members.cols(); ++i) {
        const double expected = (i == j ? 1.0 : 0.0) + 1.0;
        green = std::max(green, std::abs(energy(net, VertexFunction(members.col(i)), lap) - expected));
      }
    }
    const bool pass = report.residual <= tol && report.orthonormality <= tol && expectation <= tol && green <= tol;
    ok = ok && pass;
    csv << set.size() << ',' << format_double(report.residual) << ',' << format_double(report.orthonormality) << ','
        << format_double(expectation) << ',' << format_double(green) << ',' << (pass ? "true" : "false") << '\n';
    rows.push_back({{"k", set.size()},
                    {"reciprocity", number(report.residual)},
                    {"orthonormality", number(report.orthonormality)},
                    {"expectation_identity", number(expectation)},
                    {"green_identity", number(green)},
                    {"pass", pass}});
  }
  if (json_output(cfg)) {
    Json doc = {{"tolerance", tol}, {"pass", ok}, {"rows", rows}};
    emit(cfg, doc.dump(2) + "\n");
  } else {
    emit(cfg, csv.str());
  }
  return ok ? kExitPass : kExitCheckFailed;
}

int decimal_places_for(double tol) {
  return std::max(1, static_cast<int>(std::ceil(-std::log10(tol) - 1e-12)));
}

int cmd_defect(const RunConfig& cfg) {
  const ExactRational b = parse_rational(cfg.b);
  if (b <= 1) throw Error(ErrorCode::InvalidRatio, "--b must exceed 1");
  std::ostringstream os;
  bool ok = true;

  if (cfg.limit) {
    const double tol = tolerance_or(cfg, 1e-6);
    const DefectLimit lim = defect_limit(b, tol);
    if (json_output(cfg)) {
      Json doc = {{"b", to_string(b)},
                  {"estimate", lim.estimate},
                  {"half_width", lim.half_width},
                  {"tolerance", tol},
                  {"lower", lim.bounds.lower},
                  {"upper", lim.bounds.upper},
                  {"tail_bound", lim.tail_bound},
                  {"terms", lim.n_used},
                  {"growth_exponent", lim.m}};
      os << doc.dump(2) << '\n';
    } else {
      std::ostringstream value;
      value.setf(std::ios::fixed);
      value.precision(decimal_places_for(tol));
      value << lim.estimate;
      os << value.str() << " ± " << format_double(tol) << '\n';
      os << "certified interval [" << format_double(lim.bounds.lower) << ", " << format_double(lim.bounds.upper)
         << "], tail bound " << format_double(lim.tail_bound) << ", N = " << lim.n_used << ", m = " << lim.m << '\n';
    }
    emit(cfg, os.str());
    return kExitPass;
  }

  const Index n_max = cfg.n.value_or(9);
  const DefectSeries series = defect_recursion(b, n_max);
  Json mismatches = Json::array();
  if (cfg.check_paper) {
    if (b != 2) throw Error(ErrorCode::InvalidParameter, "--check-paper needs --b 2");
    const DefectFixtures& fx = defect_fixtures_b2();
    for (const auto& f : fx.fractions) {
      if (f.n >= series.length()) continue;
      if (series.psi[f.n] != f.value) mismatches.push_back({{"n", f.n}, {"expected", to_string(f.value)}, {"got", to_string(series.psi[f.n])}});
    }
    for (const auto& d : fx.decimals) {
      if (d.n >= series.length()) continue;
      const int places = 4;
      const std::string got = to_decimal(series.psi[d.n], places);
      const bool exact_match = got == pad_decimal(d.text, places);
      // Printed values may be truncated rather than rounded in the last place.
      const bool close = std::abs(series.u(d.n) - std::stod(d.text)) < std::pow(10.0, -places);
      if (!exact_match && !close) mismatches.push_back({{"n", d.n}, {"expected", d.text}, {"got", got}});
    }
    ok = mismatches.empty();
  }

  if (cfg.plot) {
    if (json_output(cfg)) {
      Json points = Json::array();
      for (Index n = 0; n < series.length(); ++n) points.push_back({{"x", n}, {"u", series.u(n)}});
      os << points.dump(2) << '\n';
    } else {
      write_defect_plot(os, series);
    }
  } else if (json_output(cfg)) {
    Json rows = Json::array();
    for (Index n = 0; n < series.length(); ++n) {
      Json row = {{"n", n}};
      if (series.exact) {
        row["fraction"] = to_string(series.psi[n]);
        row["decimal"] = to_decimal(series.psi[n], 10);
      } else {
        row["lower"] = series.psi_bounds[n].lower;
        row["upper"] = series.psi_bounds[n].upper;
      }
      rows.push_back(std::move(row));
    }
    Json doc = {{"b", to_string(b)}, {"rows", rows}};
    if (cfg.check_paper) doc["reference_check"] = {{"pass", ok}, {"mismatches", mismatches}};
    os << doc.dump(2) << '\n';
  } else {
    if (series.exact) {
      os << "n,fraction,decimal\n";
      for (Index n = 0; n < series.length(); ++n) {
        os << n << ',' << to_string(series.psi[n]) << ',' << to_decimal(series.psi[n], 10) << '\n';
      }
    } else {
      write_defect_csv(os, series);
    }
    if (!ok) {
      for (const auto& m : mismatches) std::cerr << "fixture mismatch: " << m.dump() << '\n';
    }
  }
  emit(cfg, os.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_heat(const RunConfig& cfg) {
  const double tol = tolerance_or(cfg, 1e-10);
  const Index k_min = cfg.k_min.value_or(1);
  const Index k_max = cfg.k_max.value_or(40);
  MassSequence masses;
  if (!cfg.network_path.empty()) {
    const ResistanceNetwork net = load_network(cfg, 0);
    const Index x = cfg.x ? vertex_by_label(net, *cfg.x) : net.origin();
    masses = stochastic_mass(net, Exhaustion::intervals(0, k_min, k_max), cfg.t, x, tol);
  } else {
    const FamilySpec spec = family_spec(cfg, k_max + 2);
    const Index x = cfg.x ? static_cast<Index>(std::stoul(*cfg.x)) : 0;
    masses = stochastic_mass(spec, k_min, k_max, cfg.t, x, tol);
  }
  const bool ok = masses.monotone && masses.max_excess <= tol;
  std::ostringstream os;
  if (json_output(cfg)) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < masses.k.size(); ++i) rows.push_back({{"k", masses.k[i]}, {"mass", masses.mass[i]}});
    Json doc = {{"t", cfg.t}, {"rows", rows}, {"estimate", masses.estimate}, {"monotone", masses.monotone},
                {"max_excess", masses.max_excess}, {"pass", ok}};
    os << doc.dump(2) << '\n';
  } else {
    write_mass_csv(os, masses);
  }
  emit(cfg, os.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_measure(const RunConfig& cfg) {
  const double tol = tolerance_or(cfg, 1e-12);
  const Index k_max = cfg.k_max.value_or(15);
  const ResistanceNetwork net = load_network(cfg, k_max + 1);
  const Index origin = resolve_origin(net, cfg);
  const auto measures = exhaustion_measures(net, origin, Exhaustion(growing_sets(net, origin, cfg.k_min.value_or(1), k_max), origin));
  bool ok = true;
  std::ostringstream os;
  Json rows = Json::array();
  if (!json_output(cfg)) os << "sigma,weight,k\n";
  for (const auto& mu : measures) {
    double total = 0.0;
    for (const auto& atom : mu.atoms) {
      total += atom.weight;
      if (json_output(cfg)) {
        rows.push_back({{"sigma", atom.sigma}, {"weight", atom.weight}, {"k", mu.exhaustion_index}});
      } else {
        os << format_double(atom.sigma) << ',' << format_double(atom.weight) << ',' << mu.exhaustion_index << '\n';
      }
    }
    ok = ok && std::abs(total - 1.0) <= tol * static_cast<double>(mu.atoms.size());
  }
  if (json_output(cfg)) {
    Json sweep = Json::array();
    for (std::size_t i = 0; i + 1 < measures.size(); ++i) {
      sweep.push_back({{"k", measures[i].exhaustion_index}, {"kolmogorov_distance", kolmogorov_distance(measures[i], measures[i + 1])}});
    }
    Json doc = {{"atoms", rows}, {"sweep", sweep}, {"pass", ok}};
    os << doc.dump(2) << '\n';
  }
  emit(cfg, os.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_growth(const RunConfig& cfg) {
  const Index k_min = cfg.k_min.value_or(0);
  const Index k_max = cfg.k_max.value_or(15);
  const ResistanceNetwork net = load_network(cfg, k_max + 2);
  const GrowthReport report = off_diagonal_growth(MatrixLaplacianView::from_network(net), Exhaustion::intervals(0, k_min, k_max));
  std::ostringstream os;
  if (json_output(cfg)) {
    write_growth_json(os, report);
  } else {
    os << "k,norm,partial_sum,verdict\n";
    for (std::size_t i = 0; i < report.k.size(); ++i) {
      os << report.k[i] << ',' << format_double(report.norms[i]) << ',' << format_double(report.partial_sums[i]) << ','
         << verdict_name(report.verdict) << '\n';
    }
  }
  emit(cfg, os.str());
  return kExitPass;
}

int cmd_gram(const RunConfig& cfg) {
  const ResistanceNetwork net = load_network(cfg, 12);
  const Index origin = resolve_origin(net, cfg);
  const GramMatrix gram = gram_matrix(net, origin, all_but(net, origin));
  std::ostringstream os;
  if (json_output(cfg)) {
    Json labels = Json::array();
    for (Index x : gram.index_order) labels.push_back(net.label(x));
    Json entries = Json::array();
    for (Eigen::Index i = 0; i < gram.entries.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < gram.entries.cols(); ++j) row.push_back(gram.entries(i, j));
      entries.push_back(std::move(row));
    }
    os << Json{{"origin", net.label(origin)}, {"index", labels}, {"entries", entries}}.dump(2) << '\n';
  } else {
    write_gram_csv(os, net, gram);
  }
  emit(cfg, os.str());
  return kExitPass;
}

int cmd_dipole(const RunConfig& cfg) {
  const ResistanceNetwork net = load_network(cfg, 12);
  const Index origin = resolve_origin(net, cfg);
  if (!cfg.x) throw Error(ErrorCode::InvalidParameter, "--x is required");
  const EnergyVector v = solve_dipole(net, origin, vertex_by_label(net, *cfg.x));
  std::ostringstream os;
  if (json_output(cfg)) {
    Json values = Json::object();
    for (Index y = 0; y < net.size(); ++y) values[net.label(y)] = v(static_cast<Eigen::Index>(y));
    os << Json{{"origin", net.label(origin)}, {"x", *cfg.x}, {"values", values}}.dump(2) << '\n';
  } else {
    write_energy_vector_csv(os, net, v);
  }
  emit(cfg, os.str());
  return kExitPass;
}

int cmd_probe(const RunConfig& cfg) {
  L2Probe probe;
  if (!cfg.network_path.empty()) {
    probe = l2_defect_probe(load_network(cfg, 0));
  } else {
    probe = l2_defect_probe(family_spec(cfg, 0), cfg.n.value_or(1000));
  }
  std::ostringstream os;
  if (json_output(cfg)) {
    Json rows = Json::array();
    for (std::size_t n = 0; n < probe.values.size(); ++n) {
      rows.push_back({{"n", n}, {"value", number(probe.values[n])}, {"partial_norm", number(probe.partial_norms[n])},
                      {"log10_partial_norm", number(probe.log10_partial_norms[n])}});
    }
    os << rows.dump(2) << '\n';
  } else {
    os << "n,value,partial_norm,log10_partial_norm\n";
    for (std::size_t n = 0; n < probe.values.size(); ++n) {
      os << n << ',' << format_double(probe.values[n]) << ',' << format_double(probe.partial_norms[n]) << ','
         << format_double(probe.log10_partial_norms[n]) << '\n';
    }
  }
  emit(cfg, os.str());
  return kExitPass;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  auto* network = sub->add_option("--network", cfg.network_path, "network JSON file");
  auto* generator = sub->add_option("--generator", cfg.generator,
                                    "geometric_halfline | unit_path | binary_tree | complete | random_weighted");
  network->excludes(generator);
  sub->add_option("--b", cfg.b, "ratio b of the geometric half-line, e.g. 2 or 5/2");
  sub->add_option("--n", cfg.n, "vertex count (depth for binary_tree, terms for defect)");
  sub->add_option("--origin", cfg.origin, "origin vertex id");
  sub->add_option("--kmin", cfg.k_min, "first exhaustion index");
  sub->add_option("--kmax", cfg.k_max, "last exhaustion index");
  sub->add_option("--tol", cfg.tolerance, "tolerance");
  sub->add_option("--seed", cfg.seed, "seed for random_weighted");
  sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", cfg.out, "output path (stdout when absent)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacians on resistance networks: dipoles, spectral reciprocity, defects and heat flow"};
  app.require_subcommand(1);
  RunConfig cfg;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Command> commands = {
      {"validate", "check the matrix Laplacian axioms and principal minors", cmd_validate},
      {"reciprocity", "residual table of the reciprocity identity along an exhaustion", cmd_reciprocity},
      {"defect", "exact defect vector of the geometric half-line", cmd_defect},
      {"heat", "Dirichlet stochastic mass along an exhaustion", cmd_heat},
      {"measure", "spectral measure atoms along an exhaustion", cmd_measure},
      {"growth", "off-diagonal growth norms and verdict", cmd_growth},
      {"gram", "Gram matrix of the dipoles", cmd_gram},
      {"dipole", "dipole v_x as a vertex function", cmd_dipole},
      {"probe", "l2 probe of (A + I)v = 0 on a half-line", cmd_probe},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    add_common(sub, cfg);
    subs.emplace_back(sub, &command);
  }
  for (auto& [sub, command] : subs) {
    const std::string name = command->name;
    if (name == "heat" || name == "dipole") {
      sub->add_option("--x", cfg.x, "vertex id");
    }
    if (name == "heat") sub->add_option("--t", cfg.t, "time t >= 0");
    if (name == "defect") {
      sub->add_flag("--check-paper", cfg.check_paper, "compare with the published b = 2 values");
      sub->add_flag("--limit", cfg.limit, "certified limit u(inf) to --tol (default 1e-6)");
      sub->add_flag("--plot", cfg.plot, "two-column (x, u) plot data");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  for (auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    try {
      return command->run(cfg);
    } catch (const Error& e) {
      std::cerr << "netlap " << command->name << ": " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "netlap " << command->name << ": " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitUsage;
}
