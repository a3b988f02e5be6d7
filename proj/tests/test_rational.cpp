#include "doctest.h"

#include "revmech/rational.hpp"

using namespace revmech;

TEST_CASE("parse_rational reads fractions, integers and decimals exactly")
{
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-6/8") == Rational(-3, 4));
    CHECK(parse_rational("7") == Rational(7));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational("-2.5e-3") == Rational(-1, 400));
    CHECK(parse_rational("1E2") == Rational(100));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("010") == Rational(10));
    CHECK(parse_rational("007/08") == Rational(7, 8));
}

TEST_CASE("parse_rational rejects malformed text")
{
    CHECK_THROWS_AS(parse_rational(""), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/2/3"), ParseError);
    CHECK_THROWS_AS(parse_rational("1.2.3"), ParseError);
}

TEST_CASE("to_string prints lowest terms")
{
    CHECK(to_string(Rational(2, 4)) == "1/2");
    CHECK(to_string(Rational(6, 3)) == "2");
    CHECK(to_string(Rational(-1, 3)) == "-1/3");
    CHECK(to_string(parse_rational(to_string(Rational(22, 7)))) == "22/7");
}

TEST_CASE("bit lengths and powers of two")
{
    CHECK(bit_length(Rational(0)) == 1);
    CHECK(bit_length(Rational(1, 8)) == 4);
    CHECK(bit_length(Rational(-255, 2)) == 8);
    CHECK(inverse_power_of_two(0) == 1);
    CHECK(inverse_power_of_two(10) == Rational(1, 1024));
}

TEST_CASE("dot and linf_distance")
{
    RationalVector a{Rational(1, 2), Rational(0), Rational(-1)};
    RationalVector b{Rational(2), Rational(5), Rational(1, 3)};
    CHECK(dot(a, b) == Rational(2, 3));
    CHECK(linf_distance(a, b) == Rational(5));
    CHECK(to_double(Rational(1, 4)) == doctest::Approx(0.25));
}
