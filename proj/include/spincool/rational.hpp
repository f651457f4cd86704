#pragma once

// Exact-rational arithmetic for small golden traces. The partner pairing
// trace evolves the shifted-and-scaled diagonal through halvings and unit
// shifts, so every entry is a dyadic rational; cpp_rational keeps them
// exact for bit-for-bit comparison against hand-derived tables.

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace spincool {

using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

inline Rational rational_from_string(const std::string& s) {
  return Rational(s);
}

inline std::vector<std::string> to_strings(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

}  // namespace spincool
