#include "netlap/fixtures.hpp"

#include <sstream>

#include "fixtures_data.hpp"
#include "netlap/error.hpp"

namespace netlap {

namespace {

DefectFixtures parse_fixtures(const std::string& csv) {
  DefectFixtures out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw Error(ErrorCode::ParseError, "malformed fixture row: " + line);
    }
    const std::string kind = line.substr(0, first);
    const Index n = std::stoul(line.substr(first + 1, second - first - 1));
    const std::string value = line.substr(second + 1);
    if (kind == "fraction") {
      out.fractions.push_back({n, parse_rational(value)});
    } else if (kind == "decimal") {
      out.decimals.push_back({n, value});
    } else if (kind == "limit") {
      out.limit = std::stod(value);
    } else if (kind == "exceeds") {
      out.first_exceeding = n;
      out.threshold = parse_rational(value);
    } else {
      throw Error(ErrorCode::ParseError, "unknown fixture kind: " + kind);
    }
  }
  return out;
}

}  // namespace

const DefectFixtures& defect_fixtures_b2() {
  static const DefectFixtures fixtures = parse_fixtures(detail::kDefectFixtureCsv);
  return fixtures;
}

int printed_places(const std::string& text) {
  const auto dot = text.find('.');
  return dot == std::string::npos ? 0 : static_cast<int>(text.size() - dot - 1);
}

std::string pad_decimal(const std::string& text, int places) {
  std::string out = text;
  if (out.find('.') == std::string::npos) out += '.';
  while (printed_places(out) < places) out += '0';
  return out;
}

}  // namespace netlap
