#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netlap/defect.hpp"
#include "netlap/dipole.hpp"
#include "netlap/error.hpp"
#include "netlap/heat.hpp"
#include "netlap/io.hpp"
#include "netlap/reciprocity.hpp"

namespace py = pybind11;
using namespace netlap;

namespace {

FamilySpec family_spec(const std::string& name, Index n, const std::string& b, std::uint64_t seed) {
  const auto kind = family_from_name(name);
  if (!kind) throw Error(ErrorCode::InvalidParameter, "unknown family \"" + name + "\"");
  FamilySpec spec;
  spec.kind = *kind;
  spec.size = n;
  spec.ratio = parse_rational(b);
  spec.seed = seed;
  return spec;
}

py::dict limit_dict(const DefectLimit& lim) {
  py::dict d;
  d["estimate"] = lim.estimate;
  d["half_width"] = lim.half_width;
  d["lower"] = lim.bounds.lower;
  d["upper"] = lim.bounds.upper;
  d["tail_bound"] = lim.tail_bound;
  d["n_used"] = lim.n_used;
  return d;
}

}  // namespace

PYBIND11_MODULE(_netlap, m) {
  m.doc() = "Laplacians on weighted networks: dipoles, spectral reciprocity, defect vectors and heat kernels";

  static py::exception<Error> error(m, "NetlapError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ResistanceNetwork>(m, "Network")
      .def_property_readonly("size", &ResistanceNetwork::size)
      .def_property_readonly("origin", &ResistanceNetwork::origin)
      .def_property_readonly("labels", &ResistanceNetwork::labels)
      .def("conductance", &ResistanceNetwork::conductance, py::arg("x"), py::arg("y"))
      .def("laplacian", &ResistanceNetwork::laplacian_matrix)
      .def("to_json", [](const ResistanceNetwork& net) {
        std::ostringstream os;
        write_network_json(os, net);
        return os.str();
      })
      .def("__repr__", [](const ResistanceNetwork& net) {
        return "<netlap.Network with " + std::to_string(net.size()) + " vertices>";
      });

  m.def(
      "generate",
      [](const std::string& family, Index n, const std::string& b, std::uint64_t seed) {
        return generate(family_spec(family, n, b, seed));
      },
      py::arg("family"), py::arg("n"), py::arg("b") = "2", py::arg("seed") = 0);
  m.def(
      "from_json", [](const std::string& text) { return to_network(parse_network_json(text)); }, py::arg("text"));
  m.def(
      "from_edges",
      [](const std::vector<std::tuple<Index, Index, double>>& edges, Index origin) {
        std::vector<Edge> list;
        for (const auto& [u, v, c] : edges) list.push_back({u, v, c});
        return build_network(list, origin);
      },
      py::arg("edges"), py::arg("origin") = 0);

  m.def(
      "gram_matrix",
      [](const ResistanceNetwork& net, std::optional<std::vector<Index>> index_set) {
        return gram_matrix(net, net.origin(), index_set ? *index_set : all_but(net, net.origin())).entries;
      },
      py::arg("network"), py::arg("index_set") = py::none());
  m.def(
      "dipole", [](const ResistanceNetwork& net, Index x) { return solve_dipole(net, net.origin(), x); },
      py::arg("network"), py::arg("x"));
  m.def(
      "reciprocity",
      [](const ResistanceNetwork& net, std::optional<std::vector<Index>> index_set) {
        const ReciprocityReport r =
            verify_reciprocity(net, net.origin(), index_set ? *index_set : all_but(net, net.origin()));
        py::dict d;
        d["residual"] = r.residual;
        d["orthonormality"] = r.orthonormality;
        d["compressed"] = r.compressed;
        d["predicted"] = r.predicted;
        return d;
      },
      py::arg("network"), py::arg("index_set") = py::none());

  m.def(
      "defect_fractions",
      [](const std::string& b, Index n) {
        const DefectSeries s = defect_recursion(parse_rational(b), n);
        std::vector<std::string> out;
        for (const auto& u : s.psi) out.push_back(to_string(u));
        return out;
      },
      py::arg("b"), py::arg("n"));
  m.def(
      "verify_eigen_equation",
      [](const std::string& b, Index n) { return verify_eigen_equation(defect_recursion(parse_rational(b), n)).holds; },
      py::arg("b"), py::arg("n"));
  m.def(
      "defect_limit", [](const std::string& b, double tol) { return limit_dict(defect_limit(parse_rational(b), tol)); },
      py::arg("b") = "2", py::arg("tol") = 1e-6);

  m.def(
      "heat_kernel", [](const ResistanceNetwork& net, double t) { return heat_kernel(net, t).kernel; },
      py::arg("network"), py::arg("t"));
  m.def(
      "stochastic_mass",
      [](const std::string& family, const std::string& b, Index kmin, Index kmax, double t, Index x) {
        return stochastic_mass(family_spec(family, 0, b, 0), kmin, kmax, t, x).mass;
      },
      py::arg("family"), py::arg("b") = "2", py::arg("kmin") = 1, py::arg("kmax") = 40, py::arg("t") = 1.0,
      py::arg("x") = 0);
  m.def(
      "off_diagonal_growth",
      [](const ResistanceNetwork& net, Index kmin, Index kmax) {
        const GrowthReport g =
            off_diagonal_growth(MatrixLaplacianView::from_network(net), Exhaustion::intervals(0, kmin, kmax));
        py::dict d;
        d["k"] = g.k;
        d["norms"] = g.norms;
        d["partial_sums"] = g.partial_sums;
        d["verdict"] = verdict_name(g.verdict);
        return d;
      },
      py::arg("network"), py::arg("kmin"), py::arg("kmax"));
}
