#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace efcg {

// Scores are kept as exact fractions and only rendered to double at the
// boundary (reports, JSON).
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_fraction(std::int64_t num, std::int64_t den) {
  return Rational(num, den);
}

double to_double(const Rational& r);

// "7/12", or "1" / "0" for integral values.
std::string to_fraction_string(const Rational& r);

}  // namespace efcg
