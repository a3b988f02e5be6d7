#include "revmech/rational.hpp"

#include <cctype>

namespace revmech {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

// GMP reads a leading 0 as an octal prefix.
Integer decimal_integer(std::string_view digits)
{
    while (digits.size() > 1 && digits.front() == '0') {
        digits.remove_prefix(1);
    }
    return Integer{std::string(digits.empty() ? "0" : digits)};
}

Integer parse_integer(std::string_view s, std::string_view whole)
{
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw ParseError("malformed rational \"" + std::string(whole) + "\"");
    }
    Integer value = decimal_integer(s);
    return negative ? Integer(-value) : value;
}

Integer power_of_ten(std::size_t exponent)
{
    Integer result = 1;
    for (std::size_t k = 0; k < exponent; ++k) {
        result *= 10;
    }
    return result;
}

Rational parse_decimal(std::string_view text)
{
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        Integer exp_value = parse_integer(s.substr(e + 1), text);
        if (abs(exp_value) > 4096) {
            throw ParseError("exponent out of range in \"" + std::string(text) + "\"");
        }
        exponent = exp_value.convert_to<long long>();
        s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot_pos = s.find('.'); dot_pos != std::string_view::npos) {
        int_part = s.substr(0, dot_pos);
        frac_part = s.substr(dot_pos + 1);
    }
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
        throw ParseError("malformed rational \"" + std::string(text) + "\"");
    }
    std::string digits = std::string(int_part) + std::string(frac_part);
    Integer numerator = decimal_integer(digits);
    long long scale = static_cast<long long>(frac_part.size()) - exponent;
    Rational value;
    if (scale >= 0) {
        value = Rational(numerator, power_of_ten(static_cast<std::size_t>(scale)));
    } else {
        value = Rational(numerator * power_of_ten(static_cast<std::size_t>(-scale)));
    }
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        throw ParseError("empty rational");
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash), text);
        Integer den = parse_integer(text.substr(slash + 1), text);
        if (den == 0) {
            throw ParseError("zero denominator in \"" + std::string(text) + "\"");
        }
        return Rational(num, den);
    }
    return parse_decimal(text);
}

std::string to_string(const Rational& value)
{
    const Integer& den = denominator(value);
    if (den == 1) {
        return numerator(value).str();
    }
    return numerator(value).str() + "/" + den.str();
}

double to_double(const Rational& value)
{
    return value.convert_to<double>();
}

std::size_t bit_length(const Integer& value)
{
    if (value == 0) {
        return 1;
    }
    return boost::multiprecision::msb(abs(value)) + 1;
}

std::size_t bit_length(const Rational& value)
{
    return std::max(bit_length(numerator(value)), bit_length(denominator(value)));
}

Rational inverse_power_of_two(std::size_t exponent)
{
    Integer den = 1;
    den <<= exponent;
    return Rational(Integer(1), den);
}

Rational dot(const RationalVector& a, const RationalVector& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: dimension mismatch");
    }
    Rational sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].is_zero() && !b[k].is_zero()) {
            sum += a[k] * b[k];
        }
    }
    return sum;
}

Rational linf_distance(const RationalVector& a, const RationalVector& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("linf_distance: dimension mismatch");
    }
    Rational best = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        Rational diff = abs(a[k] - b[k]);
        if (diff > best) {
            best = diff;
        }
    }
    return best;
}

}  // namespace revmech
