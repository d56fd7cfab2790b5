/**
 * @file rational.hpp
 * @brief Exact rational scalars (GMP) and their text form "p/q".
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace clustercc {

using Rational = mpq_class;
using Integer = mpz_class;

/// Integer vectors: dimension vectors, g-vectors, exponent vectors, columns.
using IntVector = std::vector<long long>;
/// Dense integer matrices stored as a list of rows.
using IntMatrix = std::vector<IntVector>;

/// Parses "p", "-p" or "p/q" into a canonical rational. Throws Error("ParseError").
Rational parse_rational(const std::string& text);

/// Canonical text: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

/// Converts an integer-valued rational to long long. Throws Error("Overflow")
/// when the value is not an integer or does not fit.
long long to_int64(const Rational& r);

std::string to_string(const IntVector& v);

}  // namespace clustercc
