#include "framecommit/probability.hpp"

#include <cstdio>

namespace framecommit {

std::string to_fraction_string(const Probability& p) {
  const auto num = boost::multiprecision::numerator(p);
  const auto den = boost::multiprecision::denominator(p);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal_string(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string to_report_string(const Probability& p) {
  return to_fraction_string(p) + " (" + to_decimal_string(to_double(p)) + ")";
}

}  // namespace framecommit
