#include "netlap/rational.hpp"

#include <cctype>

#include "netlap/error.hpp"

namespace netlap {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

}  // namespace

ExactRational parse_rational(std::string_view text) {
  std::string_view body = text;
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  ExactRational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'");
    }
    mpz_class d{std::string(den), 10};
    if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    result = ExactRational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      throw Error(ErrorCode::ParseError, "malformed decimal '" + std::string(text) + "'");
    }
    mpz_class scale = 1;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class digits(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    result = ExactRational(digits, scale);
  } else {
    if (!all_digits(body)) throw Error(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
    result = ExactRational(mpz_class(std::string(body), 10), 1);
  }
  result.canonicalize();
  return negative ? ExactRational(-result) : result;
}

ExactRational pow(const ExactRational& base, unsigned long exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  ExactRational out(num, den);
  out.canonicalize();
  return out;
}

std::string to_decimal(const ExactRational& value, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  // round half away from zero
  mpz_class scaled_num = abs(value.get_num()) * scale * 2 + value.get_den();
  mpz_class q = scaled_num / (value.get_den() * 2);
  std::string s = q.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  std::string out = sgn(value) < 0 && q != 0 ? "-" : "";
  out += s.substr(0, s.size() - static_cast<std::size_t>(digits));
  if (digits > 0) out += "." + s.substr(s.size() - static_cast<std::size_t>(digits));
  return out;
}

std::string to_string(const ExactRational& value) {
  ExactRational reduced = value;
  reduced.canonicalize();
  return reduced.get_str();
}

}  // namespace netlap
