#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace framecommit {

/// Exact probability / distance value. Unbounded rational so enumeration
/// results never round.
using Probability = boost::multiprecision::cpp_rational;

inline Probability ratio(std::int64_t num, std::int64_t den) {
  return Probability(num, den);
}

inline double to_double(const Probability& p) { return p.convert_to<double>(); }

/// "p/q" form, integers print without a denominator.
std::string to_fraction_string(const Probability& p);

/// Decimal with 17 significant digits.
std::string to_decimal_string(double value);

/// "p/q (decimal)" used in reports.
std::string to_report_string(const Probability& p);

}  // namespace framecommit
