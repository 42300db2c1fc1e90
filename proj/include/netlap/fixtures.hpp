#pragma once

// Published reference values for the b = 2 defect vector, compiled in from
// data/defect_b2.csv.

#include <string>
#include <vector>

#include "netlap/network.hpp"
#include "netlap/rational.hpp"

namespace netlap {

struct FractionFixture {
  Index n = 0;
  ExactRational value;
};

struct DecimalFixture {
  Index n = 0;
  std::string text;  // as printed
};

struct DefectFixtures {
  std::vector<FractionFixture> fractions;
  std::vector<DecimalFixture> decimals;
  double limit = 0.0;
  Index first_exceeding = 0;
  ExactRational threshold;
};

const DefectFixtures& defect_fixtures_b2();

/// Places after the decimal point in a printed value.
int printed_places(const std::string& text);

/// Pads a printed value with zeros to `places` decimals, so "1.5" compares
/// equal to a four-place rendering.
std::string pad_decimal(const std::string& text, int places);

}  // namespace netlap
