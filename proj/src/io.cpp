#include "netlap/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netlap/error.hpp"
#include "netlap/format.hpp"

namespace netlap {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) throw Error(ErrorCode::ParseError, "unknown key \"" + key + "\" in " + std::string(where));
  }
}

std::string id_text(const json& id, std::string_view where) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw Error(ErrorCode::ParseError, std::string(where) + " must be a string or an integer");
}

const json& required(const json& object, const char* key, std::string_view where) {
  const auto it = object.find(key);
  if (it == object.end()) throw Error(ErrorCode::ParseError, "missing \"" + std::string(key) + "\" in " + std::string(where));
  return *it;
}

FamilySpec parse_family(const json& node) {
  if (!node.is_object()) throw Error(ErrorCode::ParseError, "family must be an object");
  reject_unknown_keys(node, {"name", "params"}, "family");
  const json& name = required(node, "name", "family");
  if (!name.is_string()) throw Error(ErrorCode::ParseError, "family name must be a string");
  const auto kind = family_from_name(name.get<std::string>());
  if (!kind) throw Error(ErrorCode::ParseError, "unknown family \"" + name.get<std::string>() + "\"");
  FamilySpec spec;
  spec.kind = *kind;
  if (const auto params = node.find("params"); params != node.end()) {
    if (!params->is_object()) throw Error(ErrorCode::ParseError, "family params must be an object");
    reject_unknown_keys(*params, {"b", "n", "seed"}, "family params");
    if (const auto b = params->find("b"); b != params->end()) {
      if (b->is_string()) {
        spec.ratio = parse_rational(b->get<std::string>());
      } else if (b->is_number_integer()) {
        spec.ratio = ExactRational(b->get<long>());
      } else if (b->is_number()) {
        spec.ratio = ExactRational(b->get<double>());
      } else {
        throw Error(ErrorCode::ParseError, "family parameter b must be a number or a fraction string");
      }
    }
    if (const auto n = params->find("n"); n != params->end()) {
      if (!n->is_number_unsigned()) throw Error(ErrorCode::ParseError, "family parameter n must be a non-negative integer");
      spec.size = n->get<Index>();
    }
    if (const auto seed = params->find("seed"); seed != params->end()) {
      if (!seed->is_number_unsigned()) throw Error(ErrorCode::ParseError, "family parameter seed must be a non-negative integer");
      spec.seed = seed->get<std::uint64_t>();
    }
  }
  return spec;
}

}  // namespace

NetworkDocument parse_network_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "network file must hold a JSON object");
  reject_unknown_keys(doc, {"vertices", "edges", "origin", "family"}, "network");

  NetworkDocument out;
  std::map<std::string, Index> index_of;
  const json& vertices = required(doc, "vertices", "network");
  if (!vertices.is_array()) throw Error(ErrorCode::ParseError, "vertices must be an array");
  for (const auto& id : vertices) {
    std::string label = id_text(id, "vertex id");
    if (!index_of.emplace(label, out.labels.size()).second) {
      throw Error(ErrorCode::ParseError, "duplicate vertex id \"" + label + "\"");
    }
    out.labels.push_back(std::move(label));
  }
  auto lookup = [&](const json& id, std::string_view where) {
    const std::string label = id_text(id, where);
    const auto it = index_of.find(label);
    if (it == index_of.end()) throw Error(ErrorCode::ParseError, "unknown vertex \"" + label + "\"");
    return it->second;
  };

  const json& edges = required(doc, "edges", "network");
  if (!edges.is_array()) throw Error(ErrorCode::ParseError, "edges must be an array");
  for (const auto& edge : edges) {
    if (!edge.is_object()) throw Error(ErrorCode::ParseError, "each edge must be an object");
    reject_unknown_keys(edge, {"u", "v", "c"}, "edge");
    const json& c = required(edge, "c", "edge");
    if (!c.is_number()) throw Error(ErrorCode::ParseError, "edge conductance must be a number");
    out.edges.push_back({lookup(required(edge, "u", "edge"), "edge endpoint"),
                         lookup(required(edge, "v", "edge"), "edge endpoint"), c.get<double>()});
  }
  out.origin = lookup(required(doc, "origin", "network"), "origin");
  if (const auto family = doc.find("family"); family != doc.end() && !family->is_null()) {
    out.family = parse_family(*family);
  }
  return out;
}

NetworkDocument read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return parse_network_json(buffer.str());
}

ResistanceNetwork to_network(const NetworkDocument& doc) {
  ResistanceNetwork net = ResistanceNetwork::build(doc.edges, doc.origin, doc.labels.size(), doc.labels);
  if (doc.family) net = with_family(std::move(net), *doc.family);
  return net;
}

MatrixLaplacianView to_matrix_view(const NetworkDocument& doc) {
  const auto n = static_cast<Eigen::Index>(doc.labels.size());
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : doc.edges) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    if (u == v) continue;
    entries(u, v) -= e.c;
    entries(v, u) -= e.c;
    entries(u, u) += e.c;
    entries(v, v) += e.c;
  }
  return MatrixLaplacianView::from_matrix(std::move(entries));
}

void write_network_json(std::ostream& os, const ResistanceNetwork& net) {
  nlohmann::ordered_json doc;
  doc["vertices"] = net.labels();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : net.edges()) edges.push_back({{"u", net.label(e.u)}, {"v", net.label(e.v)}, {"c", e.c}});
  doc["edges"] = std::move(edges);
  doc["origin"] = net.label(net.origin());
  if (const auto& family = net.family()) {
    nlohmann::ordered_json params = {{"n", family->size}};
    if (family->kind == FamilyKind::GeometricHalfline) params["b"] = to_string(family->ratio);
    if (family->kind == FamilyKind::RandomWeighted) params["seed"] = family->seed;
    doc["family"] = {{"name", family_name(family->kind)}, {"params", params}};
  }
  os << doc.dump(2) << '\n';
}

ResidualRecord make_record(std::string check_name, double value, double tolerance) {
  return {std::move(check_name), value, tolerance, value <= tolerance};
}

void write_residual_report(std::ostream& os, const std::vector<ResidualRecord>& records) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    doc.push_back({{"check_name", r.check_name},
                   {"value", std::isfinite(r.value) ? nlohmann::ordered_json(r.value) : nlohmann::ordered_json(format_double(r.value))},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  }
  os << doc.dump(2) << '\n';
}

}  // namespace netlap
