#pragma once

#include <algorithm>
#include <random>
#include <set>

#include "revmech/feasibility.hpp"
#include "revmech/model.hpp"

namespace fixtures {

using namespace revmech;

inline Rational q(const char* text) { return parse_rational(text); }

inline BidderType type_of(std::initializer_list<const char*> values, std::string label = {})
{
    BidderType t;
    for (const char* v : values) {
        t.values.push_back(q(v));
    }
    t.label = std::move(label);
    return t;
}

/// Two bidders, one item, types A = 1/2 and B = 1 drawn iid uniformly, single item.
inline Instance i1()
{
    std::vector<BidderType> types{type_of({"1/2"}, "A"), type_of({"1"}, "B")};
    return Instance::independent({types, types}, {{q("1/2"), q("1/2")}, {q("1/2"), q("1/2")}}, 1,
                                 FeasibilitySpec::single_item());
}

/// Two bidders with one type each (value 1), single item.
inline Instance i2()
{
    return Instance::independent({{type_of({"1"})}, {type_of({"1"})}}, {{q("1")}, {q("1")}}, 1,
                                 FeasibilitySpec::single_item());
}

/// One bidder, one item, values {1/2, 1} uniform.
inline Instance i3(std::optional<RationalVector> budgets = std::nullopt)
{
    return Instance::independent({{type_of({"1/2"}), type_of({"1"})}}, {{q("1/2"), q("1/2")}}, 1,
                                 FeasibilitySpec::single_item(), std::move(budgets));
}

inline Rational random_probability_part(std::mt19937_64& rng) { return Rational(static_cast<long>(rng() % 4 + 1)); }

/// Positive probabilities with small denominators summing to 1.
inline RationalVector random_distribution(std::mt19937_64& rng, std::size_t size)
{
    RationalVector parts(size);
    Rational total = 0;
    for (auto& p : parts) {
        p = random_probability_part(rng);
        total += p;
    }
    for (auto& p : parts) {
        p /= total;
    }
    return parts;
}

inline Rational random_value(std::mt19937_64& rng)
{
    return Rational(static_cast<long>(rng() % 5), 4);
}

/// Random explicit family of at most `max_size` distinct allocations; roughly
/// half the time the empty allocation is left out, so the family is usually
/// not downward-closed.
inline FeasibilitySpec random_family(std::mt19937_64& rng, std::size_t m, std::size_t n, std::size_t max_size)
{
    std::set<Allocation> chosen;
    const std::size_t pairs = m * n;
    const std::size_t target = std::min<std::size_t>(1 + rng() % max_size, std::size_t{1} << pairs);
    if (rng() % 2 == 0) {
        chosen.insert(Allocation{});
    }
    while (chosen.size() < target) {
        const std::uint64_t mask = rng() % (std::uint64_t{1} << pairs);
        std::vector<Assignment> assignments;
        for (std::size_t k = 0; k < pairs; ++k) {
            if (mask >> k & 1) {
                assignments.push_back({k / n, k % n});
            }
        }
        chosen.insert(Allocation(std::move(assignments)));
    }
    return FeasibilitySpec::explicit_family({chosen.begin(), chosen.end()});
}

struct RandomShape
{
    std::size_t max_bidders = 3;
    std::size_t max_items = 2;
    std::size_t max_types = 2;
    std::size_t max_family = 6;
};

inline Instance random_instance(std::mt19937_64& rng, const RandomShape& shape = {})
{
    const std::size_t m = 1 + rng() % shape.max_bidders;
    const std::size_t n = 1 + rng() % shape.max_items;
    std::vector<std::vector<BidderType>> types(m);
    std::vector<RationalVector> probabilities(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t count = 1 + rng() % shape.max_types;
        for (std::size_t a = 0; a < count; ++a) {
            BidderType t;
            for (std::size_t j = 0; j < n; ++j) {
                t.values.push_back(random_value(rng));
            }
            types[i].push_back(std::move(t));
        }
        probabilities[i] = random_distribution(rng, count);
    }
    return Instance::independent(std::move(types), std::move(probabilities), n,
                                 random_family(rng, m, n, shape.max_family));
}

inline RationalVector random_weights(std::mt19937_64& rng, std::size_t d)
{
    RationalVector w(d);
    for (auto& x : w) {
        x = Rational(static_cast<long>(rng() % 9) - 4, 4);
    }
    return w;
}

/// Random convex weights over `count` entries with small denominators.
inline RationalVector random_simplex(std::mt19937_64& rng, std::size_t count) { return random_distribution(rng, count); }

}  // namespace fixtures
