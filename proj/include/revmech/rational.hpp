#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace revmech {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using RationalVector = std::vector<Rational>;

class ParseError : public std::runtime_error
{
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses "p/q", an integer, or a decimal literal such as "-0.125" or "2.5e-3".
/// Decimals are converted exactly (no floating point involved).
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Bits needed for the larger of |numerator| and denominator (at least 1).
std::size_t bit_length(const Rational& value);
std::size_t bit_length(const Integer& value);

/// 2^-exponent as an exact rational.
Rational inverse_power_of_two(std::size_t exponent);

Rational dot(const RationalVector& a, const RationalVector& b);

/// max |a_k - b_k|
Rational linf_distance(const RationalVector& a, const RationalVector& b);

}  // namespace revmech
