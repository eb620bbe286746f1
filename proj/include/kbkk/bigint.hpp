#pragma once

#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace kbkk {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace kbkk
