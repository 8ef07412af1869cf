#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace mimo {

// Upper bound on the true BER when no errors were observed in n_bits:
// -ln(1 - confidence) / n_bits.
inline double ber_upper_bound(std::int64_t n_bits, double confidence = 0.95) {
  if (n_bits < 1) throw std::invalid_argument("ber_upper_bound needs at least one bit");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");
  return -std::log(1.0 - confidence) / static_cast<double>(n_bits);
}

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
  bool overlaps(const Interval& o) const noexcept { return lower <= o.upper && o.lower <= upper; }
};

// Two-sided Clopper-Pearson interval for a binomial proportion.
inline Interval binomial_interval(std::int64_t errors, std::int64_t trials, double confidence = 0.95) {
  if (trials < 1 || errors < 0 || errors > trials) throw std::invalid_argument("binomial_interval: bad counts");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(errors);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.lower = errors == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  ci.upper = errors == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

// One-sided Clopper-Pearson upper bound.
inline double binomial_upper(std::int64_t errors, std::int64_t trials, double confidence = 0.95) {
  if (trials < 1 || errors < 0 || errors > trials) throw std::invalid_argument("binomial_upper: bad counts");
  if (errors == trials) return 1.0;
  const auto k = static_cast<double>(errors);
  return boost::math::ibeta_inv(k + 1.0, static_cast<double>(trials) - k, confidence);
}

}  // namespace mimo
