#pragma once

#include <mpfr.h>

#include <utility>

#include "netlap/rational.hpp"

namespace netlap::detail {

/// Owning handle for an mpfr_t.
class Real {
 public:
  explicit Real(mpfr_prec_t precision = 128) { mpfr_init2(value_, precision); mpfr_set_zero(value_, 1); }
  Real(const Real& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
      mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
  }
  ~Real() { mpfr_clear(value_); }

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(value_, rnd); }

 private:
  mpfr_t value_;
};

}  // namespace netlap::detail
