#include "netlap/defect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "netlap/error.hpp"
#include "netlap/format.hpp"
#include "netlap/mpfr.hpp"

namespace netlap {

namespace {

constexpr mpfr_prec_t kProbePrecision = 128;

void require_ratio(const ExactRational& b) {
  if (b <= 1) throw Error(ErrorCode::InvalidRatio, "ratio b must exceed 1, got " + to_string(b));
}

double lower_double(const ExactRational& q) {
  // mpq_get_d truncates toward zero
  const double d = q.get_d();
  return q >= 0 ? d : std::nextafter(d, -std::numeric_limits<double>::infinity());
}

double upper_double(const ExactRational& q) {
  const double d = q.get_d();
  if (ExactRational(d) == q) return d;
  return q >= 0 ? std::nextafter(d, std::numeric_limits<double>::infinity()) : d;
}

void require_exact(const DefectSeries& series, const char* what) {
  if (!series.exact) throw Error(ErrorCode::NotExact, std::string(what) + " needs an exact series");
}

// One directed-rounding pass of the recursion; all quantities stay positive,
// so rounding every operation the same way bounds the true values.
void enclosure_pass(const ExactRational& r, Index n_max, mpfr_rnd_t rnd, std::vector<double>& phi_out,
                    std::vector<double>& psi_out) {
  detail::Real ratio(kProbePrecision), rpow(kProbePrecision), phi(kProbePrecision), psi(kProbePrecision),
      term(kProbePrecision);
  mpfr_set_q(ratio.get(), r.get_mpq_t(), rnd);
  mpfr_set_ui(rpow.get(), 1, rnd);
  mpfr_set_ui(phi.get(), 0, rnd);
  mpfr_set_ui(psi.get(), 1, rnd);
  phi_out.assign(n_max + 1, 0.0);
  psi_out.assign(n_max + 1, 0.0);
  psi_out[0] = 1.0;
  for (Index n = 1; n <= n_max; ++n) {
    mpfr_add(phi.get(), phi.get(), psi.get(), rnd);
    mpfr_mul(rpow.get(), rpow.get(), ratio.get(), rnd);
    mpfr_mul(term.get(), rpow.get(), phi.get(), rnd);
    mpfr_add(psi.get(), psi.get(), term.get(), rnd);
    phi_out[n] = mpfr_get_d(phi.get(), rnd);
    psi_out[n] = mpfr_get_d(psi.get(), rnd);
  }
}

// Reduces N / p^D to lowest terms by stripping the primes of p from N,
// avoiding a full gcd on large operands.
class PowerReducer {
 public:
  explicit PowerReducer(const mpz_class& p) : p_(p) {
    if (!p.fits_ulong_p()) return;
    unsigned long m = p.get_ui();
    for (unsigned long f = 2; f * f <= m; ++f) {
      if (f > 1'000'000) return;
      if (m % f != 0) continue;
      int e = 0;
      while (m % f == 0) {
        m /= f;
        ++e;
      }
      factors_.push_back({f, e});
    }
    if (m > 1) factors_.push_back({m, 1});
    factored_ = true;
  }

  ExactRational reduce(const mpz_class& numerator, Index exponent) const {
    if (!factored_) {
      mpz_class den;
      mpz_pow_ui(den.get_mpz_t(), p_.get_mpz_t(), static_cast<unsigned long>(exponent));
      ExactRational out(numerator, den);
      out.canonicalize();
      return out;
    }
    ExactRational out;
    mpz_class num = numerator, den = 1, stripped, power;
    for (const auto& [f, e] : factors_) {
      const unsigned long available = static_cast<unsigned long>(e) * static_cast<unsigned long>(exponent);
      const unsigned long removed = mpz_remove(stripped.get_mpz_t(), num.get_mpz_t(), mpz_class(f).get_mpz_t());
      if (removed > available) {
        mpz_ui_pow_ui(power.get_mpz_t(), f, removed - available);
        num = stripped * power;
      } else {
        num = stripped;
        mpz_ui_pow_ui(power.get_mpz_t(), f, available - removed);
        den *= power;
      }
    }
    out.get_num() = num;
    out.get_den() = den;
    return out;
  }

 private:
  mpz_class p_;
  std::vector<std::pair<unsigned long, int>> factors_;
  bool factored_ = false;
};

mpz_class integer_power(Index base, int exponent) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exponent));
  return out;
}

L2Probe probe_from_resistances(const std::vector<detail::Real>& resistance) {
  // resistance[n] = 1/c_n for the edge (n-1, n), n >= 1
  const Index n_max = resistance.size() - 1;
  detail::Real v(kProbePrecision), flux(kProbePrecision), sum(kProbePrecision), step(kProbePrecision),
      square(kProbePrecision), log_sum(kProbePrecision);
  mpfr_set_ui(v.get(), 1, MPFR_RNDN);
  mpfr_set_ui(flux.get(), 0, MPFR_RNDN);
  mpfr_set_ui(sum.get(), 1, MPFR_RNDN);

  L2Probe probe;
  probe.values.reserve(n_max + 1);
  probe.partial_norms.reserve(n_max + 1);
  probe.log10_partial_norms.reserve(n_max + 1);
  auto record = [&] {
    probe.values.push_back(v.to_double());
    probe.partial_norms.push_back(sum.to_double());
    mpfr_log10(log_sum.get(), sum.get(), MPFR_RNDN);
    probe.log10_partial_norms.push_back(log_sum.to_double());
  };
  record();
  for (Index n = 1; n <= n_max; ++n) {
    mpfr_add(flux.get(), flux.get(), v.get(), MPFR_RNDN);
    mpfr_mul(step.get(), flux.get(), resistance[n].get(), MPFR_RNDN);
    mpfr_add(v.get(), v.get(), step.get(), MPFR_RNDN);
    mpfr_sqr(square.get(), v.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), square.get(), MPFR_RNDN);
    record();
  }
  return probe;
}

}  // namespace

double DefectSeries::u(Index n) const {
  if (n >= length()) throw Error(ErrorCode::InvalidParameter, "index beyond the series");
  if (exact) return psi[n].get_d();
  return 0.5 * (psi_bounds[n].lower + psi_bounds[n].upper);
}

Enclosure DefectSeries::u_bounds(Index n) const {
  if (n >= length()) throw Error(ErrorCode::InvalidParameter, "index beyond the series");
  if (exact) return {lower_double(psi[n]), upper_double(psi[n])};
  return psi_bounds[n];
}

DefectSeries defect_recursion(const ExactRational& b, Index n_max, Index exact_limit) {
  require_ratio(b);
  DefectSeries series;
  series.b = b;
  series.r = 1 / b;
  series.r.canonicalize();
  series.exact = n_max <= exact_limit;
  if (series.exact) {
    // With b = p/q, φ_n = F_n / p^{D_{n-1}} and ψ_n = P_n / p^{D_n}, D_n = n(n+1)/2:
    //   F_n = p^{n-1} F_{n-1} + P_{n-1},  P_n = p^n P_{n-1} + q^n F_n.
    // Integers only; each term is reduced once on the way out.
    const mpz_class p = series.b.get_num();
    const mpz_class q = series.b.get_den();
    const PowerReducer reducer(p);
    series.phi.reserve(n_max + 1);
    series.psi.reserve(n_max + 1);
    series.phi.emplace_back(0);
    series.psi.emplace_back(1);
    mpz_class big_f = 0, big_p = 1, ppow = 1, qpow = 1;
    for (Index n = 1; n <= n_max; ++n) {
      big_f = big_f * ppow + big_p;  // ppow = p^{n-1} here
      ppow *= p;
      qpow *= q;
      big_p = big_p * ppow + qpow * big_f;
      series.phi.push_back(reducer.reduce(big_f, (n - 1) * n / 2));
      series.psi.push_back(reducer.reduce(big_p, n * (n + 1) / 2));
    }
    return series;
  }
  std::vector<double> phi_lo, psi_lo, phi_hi, psi_hi;
  enclosure_pass(series.r, n_max, MPFR_RNDD, phi_lo, psi_lo);
  enclosure_pass(series.r, n_max, MPFR_RNDU, phi_hi, psi_hi);
  series.phi_bounds.resize(n_max + 1);
  series.psi_bounds.resize(n_max + 1);
  for (Index n = 0; n <= n_max; ++n) {
    series.phi_bounds[n] = {phi_lo[n], phi_hi[n]};
    series.psi_bounds[n] = {psi_lo[n], psi_hi[n]};
  }
  return series;
}

EigenEquationCheck verify_eigen_equation(const DefectSeries& series) {
  require_exact(series, "the eigen-equation check");
  if (series.length() < 2) throw Error(ErrorCode::SeriesTooShort, "the eigen-equation needs at least two terms");
  EigenEquationCheck check;
  check.holds = true;
  // b^n(u_n - u_{n-1}) - b^{n+1}(u_{n+1} - u_n) + u_n = 0, multiplied through by
  // q^{n+1} and a common denominator L of the three terms.
  const mpz_class p = series.b.get_num();
  const mpz_class q = series.b.get_den();
  const auto& u = series.psi;
  mpz_class ppow = 1, qpow = q;  // p^n, q^{n+1}
  ExactRational worst = 0;
  auto scaled = [](const ExactRational& x, const mpz_class& common) {
    mpz_class out;
    mpz_divexact(out.get_mpz_t(), common.get_mpz_t(), x.get_den_mpz_t());
    return mpz_class(out * x.get_num());
  };
  for (Index n = 0; n + 1 < u.size(); ++n) {
    mpz_class common = u[n + 1].get_den();
    for (Index k : {n, n > 0 ? n - 1 : n}) {
      if (!mpz_divisible_p(common.get_mpz_t(), u[k].get_den_mpz_t())) {
        mpz_class g;
        mpz_lcm(g.get_mpz_t(), common.get_mpz_t(), u[k].get_den_mpz_t());
        common = g;
      }
    }
    const mpz_class a_next = scaled(u[n + 1], common);
    const mpz_class a_now = scaled(u[n], common);
    mpz_class lhs = qpow * a_now - ppow * p * (a_next - a_now);
    if (n > 0) lhs += ppow * q * (a_now - scaled(u[n - 1], common));
    if (lhs != 0) {
      if (check.holds) {
        check.holds = false;
        check.first_failure = n;
      }
      ExactRational residual(abs(lhs), qpow * common);
      residual.canonicalize();
      if (residual > worst) worst = residual;
    }
    ppow *= p;
    qpow *= q;
    ++check.checked;
  }
  check.max_residual = worst.get_d();
  return check;
}

int growth_exponent(double b) {
  if (!(b > 1.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidRatio, "ratio b must exceed 1");
  const double base = 2.0 / (std::numbers::e * std::log(b));
  const double target = base * base;
  // m(m-1) >= target  <=>  m >= (1 + sqrt(1 + 4 target))/2
  int m = std::max(1, static_cast<int>(std::ceil(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * target)))) - 1);
  while (static_cast<double>(m) * (m - 1) < target) ++m;
  return m;
}

int growth_exponent(const ExactRational& b) {
  require_ratio(b);
  return growth_exponent(b.get_d());
}

bool GrowthCertificate::all() const {
  return std::all_of(phi_ok.begin(), phi_ok.end(), [](bool ok) { return ok; }) &&
         std::all_of(psi_ok.begin(), psi_ok.end(), [](bool ok) { return ok; });
}

GrowthCertificate verify_growth_bounds(const DefectSeries& series, int m) {
  require_exact(series, "the growth certificate");
  if (m < 1) throw Error(ErrorCode::InvalidParameter, "growth exponent must be positive");
  GrowthCertificate cert;
  cert.m = m;
  mpz_class now = 1;  // n^m
  for (Index n = 1; n < series.length(); ++n) {
    const mpz_class next = integer_power(n + 1, m);
    cert.phi_ok.push_back(series.phi[n] <= ExactRational(now));
    cert.psi_ok.push_back(series.psi[n] <= ExactRational(next - now));
    now = next;
  }
  return cert;
}

double polynomial_geometric_tail(double r, Index n_max, int power) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidRatio, "tail ratio must lie in (0, 1)");
  const double log_r = std::log(r);
  const double threshold = 0.5 * (1.0 + r);
  long double sum = 0.0L;
  for (Index n = n_max + 1;; ++n) {
    const double nd = static_cast<double>(n);
    const long double term = std::exp(static_cast<long double>(nd * log_r + power * std::log(nd)));
    const double rho = r * std::pow(1.0 + 1.0 / nd, power);
    if (rho <= threshold) {
      sum += term / (1.0L - rho);
      break;
    }
    sum += term;
    if (!std::isfinite(static_cast<double>(sum))) return std::numeric_limits<double>::infinity();
  }
  const double out = static_cast<double>(sum) * (1.0 + 1e-9);
  return std::isfinite(out) ? out : std::numeric_limits<double>::infinity();
}

DefectEnergy defect_energy(const DefectSeries& series) {
  require_exact(series, "the energy sum");
  DefectEnergy out;
  out.m = growth_exponent(series.b);
  out.partial_sums.assign(series.length(), 0.0);
  ExactRational rpow = 1;
  ExactRational total = 0;
  for (Index n = 1; n < series.length(); ++n) {
    rpow *= series.r;
    total += rpow * series.phi[n] * series.phi[n];
    out.partial_sums[n] = total.get_d();
  }
  out.total = total;
  const Index n_max = series.length() == 0 ? 0 : series.length() - 1;
  out.tail_bound = polynomial_geometric_tail(series.r.get_d(), n_max, 2 * out.m);
  return out;
}

DefectLimit defect_limit(const ExactRational& b, double tolerance) {
  require_ratio(b);
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive");
  const int m = growth_exponent(b);
  ExactRational r = 1 / b;
  r.canonicalize();
  const double rd = r.get_d();
  constexpr Index kMaxTerms = Index{1} << 24;
  Index hi = 8;
  while (polynomial_geometric_tail(rd, hi, m) >= tolerance) {
    if (hi >= kMaxTerms) throw Error(ErrorCode::InvalidParameter, "tolerance cannot be certified for this b");
    hi *= 2;
  }
  Index lo = hi / 2;  // tail(lo) >= tolerance unless lo < 8
  while (lo + 1 < hi) {
    const Index mid = lo + (hi - lo) / 2;
    (polynomial_geometric_tail(rd, mid, m) < tolerance ? hi : lo) = mid;
  }
  const DefectSeries series = defect_recursion(b, hi);
  DefectLimit out;
  out.m = m;
  out.n_used = hi;
  out.tail_bound = polynomial_geometric_tail(rd, hi, m);
  const Enclosure at_n = series.u_bounds(hi);
  out.bounds.lower = at_n.lower;
  out.bounds.upper = std::nextafter(at_n.upper + out.tail_bound, std::numeric_limits<double>::infinity());
  out.estimate = 0.5 * (out.bounds.lower + out.bounds.upper);
  out.half_width = 0.5 * out.bounds.width();
  return out;
}

Index first_index_exceeding(const DefectSeries& series, const ExactRational& threshold) {
  for (Index n = 0; n < series.length(); ++n) {
    if (series.exact ? series.psi[n] > threshold : series.psi_bounds[n].lower > threshold.get_d()) return n;
  }
  return series.length();
}

L2Probe l2_defect_probe(const FamilySpec& family, Index n_max) {
  if (!family.is_half_line()) {
    throw Error(ErrorCode::UnsupportedTopology, "the probe needs a half-line family, got " + std::string(family_name(family.kind)));
  }
  if (n_max < 1) throw Error(ErrorCode::InvalidParameter, "probe length must be at least 1");
  std::vector<detail::Real> resistance(n_max + 1, detail::Real(kProbePrecision));
  if (family.kind == FamilyKind::GeometricHalfline) {
    require_ratio(family.ratio);
    ExactRational r = 1 / family.ratio;
    r.canonicalize();
    detail::Real ratio(kProbePrecision);
    mpfr_set_q(ratio.get(), r.get_mpq_t(), MPFR_RNDN);
    mpfr_set_ui(resistance[0].get(), 1, MPFR_RNDN);
    for (Index n = 1; n <= n_max; ++n) mpfr_mul(resistance[n].get(), resistance[n - 1].get(), ratio.get(), MPFR_RNDN);
  } else {
    for (auto& value : resistance) mpfr_set_ui(value.get(), 1, MPFR_RNDN);
  }
  return probe_from_resistances(resistance);
}

L2Probe l2_defect_probe(const ResistanceNetwork& net) {
  const Index n = net.size();
  if (n < 2) throw Error(ErrorCode::UnsupportedTopology, "the probe needs a path with at least one edge");
  Index current = net.origin();
  if (net.neighbors(current).size() != 1) {
    throw Error(ErrorCode::UnsupportedTopology, "the origin must be an end of a path");
  }
  std::vector<detail::Real> resistance(1, detail::Real(kProbePrecision));
  mpfr_set_ui(resistance[0].get(), 1, MPFR_RNDN);
  Index previous = n;
  for (Index step = 1; step < n; ++step) {
    const auto& nbs = net.neighbors(current);
    if (nbs.size() > 2) throw Error(ErrorCode::UnsupportedTopology, "vertex " + net.label(current) + " branches");
    const auto next = std::find_if(nbs.begin(), nbs.end(), [&](const Neighbor& nb) { return nb.vertex != previous; });
    if (next == nbs.end()) throw Error(ErrorCode::UnsupportedTopology, "the network is not a simple path");
    detail::Real value(kProbePrecision);
    mpfr_set_d(value.get(), next->c, MPFR_RNDN);
    mpfr_ui_div(value.get(), 1, value.get(), MPFR_RNDN);
    resistance.push_back(value);
    previous = current;
    current = next->vertex;
  }
  if (net.neighbors(current).size() != 1) throw Error(ErrorCode::UnsupportedTopology, "the network is not a simple path");
  return probe_from_resistances(resistance);
}

void write_defect_csv(std::ostream& os, const DefectSeries& series, int digits) {
  if (series.exact) {
    os << "n,numerator,denominator,decimal\n";
    for (Index n = 0; n < series.length(); ++n) {
      ExactRational u = series.psi[n];
      u.canonicalize();
      os << n << ',' << u.get_num().get_str() << ',' << u.get_den().get_str() << ',' << to_decimal(u, digits) << '\n';
    }
    return;
  }
  os << "n,u_lower,u_upper\n";
  for (Index n = 0; n < series.length(); ++n) {
    os << n << ',' << format_double(series.psi_bounds[n].lower) << ',' << format_double(series.psi_bounds[n].upper)
       << '\n';
  }
}

void write_defect_plot(std::ostream& os, const DefectSeries& series) {
  os << "x,u\n";
  for (Index n = 0; n < series.length(); ++n) os << n << ',' << format_double(series.u(n)) << '\n';
}

}  // namespace netlap
