#pragma once

// Network JSON files and machine-readable residual reports.
//
//   {"vertices": [id...], "edges": [{"u": id, "v": id, "c": number}...],
//    "origin": id, "family": {"name": string, "params": {...}}}
//
// Ids may be strings or integers; unknown keys are rejected.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netlap/network.hpp"

namespace netlap {

/// Parsed file contents before any network validation.
struct NetworkDocument {
  std::vector<std::string> labels;
  std::vector<Edge> edges;  // endpoints index into labels
  Index origin = 0;
  std::optional<FamilySpec> family;
};

NetworkDocument parse_network_json(std::string_view text);
NetworkDocument read_network_file(const std::filesystem::path& path);

/// Validated network with family metadata attached when declared.
ResistanceNetwork to_network(const NetworkDocument& doc);

/// Matrix built straight from the listed edges, signs and all, so that
/// validation can report what is wrong with them.
MatrixLaplacianView to_matrix_view(const NetworkDocument& doc);

void write_network_json(std::ostream& os, const ResistanceNetwork& net);

struct ResidualRecord {
  std::string check_name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

ResidualRecord make_record(std::string check_name, double value, double tolerance);

void write_residual_report(std::ostream& os, const std::vector<ResidualRecord>& records);

}  // namespace netlap
