#pragma once

// The bounded defect vector of the geometric half-line: exact rational
// recursion, eigen-equation check, growth bounds, energy and limit, and the
// ℓ² probe that contrasts it with the ℓ² picture.

#include <iosfwd>
#include <vector>

#include "netlap/network.hpp"
#include "netlap/rational.hpp"

namespace netlap {

/// Series up to this N are kept as exact rationals; longer ones switch to
/// 128-bit directed-rounding enclosures.
inline constexpr Index kExactSeriesLimit = 1000;

struct Enclosure {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

/// φ_0 = 0, ψ_0 = 1, φ_n = φ_{n-1} + ψ_{n-1}, ψ_n = ψ_{n-1} + r^n φ_n at
/// r = 1/b; the defect vector is u(n) = ψ_n.
struct DefectSeries {
  ExactRational b;
  ExactRational r;
  bool exact = true;
  std::vector<ExactRational> phi;  // exact mode
  std::vector<ExactRational> psi;  // exact mode
  std::vector<Enclosure> phi_bounds;  // enclosure mode
  std::vector<Enclosure> psi_bounds;  // enclosure mode

  /// N + 1.
  Index length() const { return exact ? psi.size() : psi_bounds.size(); }
  /// u(n) as a double (midpoint of the enclosure in enclosure mode).
  double u(Index n) const;
  Enclosure u_bounds(Index n) const;
};

DefectSeries defect_recursion(const ExactRational& b, Index n_max, Index exact_limit = kExactSeriesLimit);

struct EigenEquationCheck {
  bool holds = false;
  Index checked = 0;  // vertices n = 0 .. N-1 were checked
  Index first_failure = 0;
  double max_residual = 0.0;
};

/// Exact check of b^n(u(n)-u(n-1)) - b^{n+1}(u(n+1)-u(n)) = -u(n) for every
/// n with a successor (the n = 0 term has no left edge).
EigenEquationCheck verify_eigen_equation(const DefectSeries& series);

/// Minimal integer m with m(m-1) >= (2/(e ln b))².
int growth_exponent(double b);
int growth_exponent(const ExactRational& b);

struct GrowthCertificate {
  int m = 0;
  std::vector<bool> phi_ok;  // index n-1 holds φ_n <= n^m
  std::vector<bool> psi_ok;  // index n-1 holds ψ_n <= (n+1)^m - n^m

  bool all() const;
};

GrowthCertificate verify_growth_bounds(const DefectSeries& series, int m);

/// Σ_{n > N} r^n n^p, bounded above with a geometric tail once the term
/// ratio r(1+1/n)^p drops below 1. +inf if it overflows.
double polynomial_geometric_tail(double r, Index n_max, int power);

struct DefectEnergy {
  std::vector<double> partial_sums;  // index N: Σ_{n=1}^{N} r^n φ_n²
  ExactRational total;               // exact last partial sum
  double tail_bound = 0.0;           // Σ_{n>N} r^n n^{2m}
  int m = 0;
};

DefectEnergy defect_energy(const DefectSeries& series);

struct DefectLimit {
  double estimate = 0.0;
  double half_width = 0.0;  // |u(∞) - estimate| <= half_width
  Enclosure bounds;         // [u(N), u(N) + tail]
  double tail_bound = 0.0;
  Index n_used = 0;
  int m = 0;
};

/// u(∞) = 1 + Σ r^n φ_n with a certified tail below `tolerance`.
DefectLimit defect_limit(const ExactRational& b, double tolerance);

/// Smallest n with u(n) > threshold, or length() when there is none.
Index first_index_exceeding(const DefectSeries& series, const ExactRational& threshold);

struct L2Probe {
  std::vector<double> values;          // v(0..N)
  std::vector<double> partial_norms;   // Σ_{n<=N} |v(n)|², may overflow to inf
  std::vector<double> log10_partial_norms;
};

/// Solution of (A + I)v = 0 with v(0) = 1 on a half-line, via the three-term
/// recurrence c_{n+1}(v(n+1)-v(n)) = c_n(v(n)-v(n-1)) + v(n), carried in
/// 128-bit floating point.
L2Probe l2_defect_probe(const FamilySpec& family, Index n_max);
/// Same on a path network read from a file; the path must start at the origin.
L2Probe l2_defect_probe(const ResistanceNetwork& net);

void write_defect_csv(std::ostream& os, const DefectSeries& series, int digits = 10);
void write_defect_plot(std::ostream& os, const DefectSeries& series);

}  // namespace netlap
