#include "doctest.h"

#include <random>

#include "fixtures.hpp"

using namespace revmech;
using fixtures::q;

namespace {

Allocation alloc(std::initializer_list<Assignment> a) { return Allocation(std::vector<Assignment>(a)); }

Allocation brute_max(const FeasibilitySpec& spec, const WeightMatrix& w)
{
    auto family = expand_family(spec, w.bidders(), w.items());
    Allocation best = family.front();
    for (const auto& a : family) {
        if (w.weight_of(a) > w.weight_of(best)) {
            best = a;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("single item picks the highest weight or nobody")
{
    const auto spec = FeasibilitySpec::single_item();
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("3/10")}, {q("7/10")}}) == alloc({{1, 0}}));
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("-3/10")}, {q("-7/10")}}).empty());
    const auto forced = FeasibilitySpec::single_item(false);
    CHECK(max_weight_allocation(forced, WeightMatrix{{q("-3/10")}, {q("-7/10")}}) == alloc({{0, 0}}));
}

TEST_CASE("public project awards the bridge only when the sum is positive")
{
    const auto spec = FeasibilitySpec::public_project();
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("1")}, {q("-2")}}).empty());
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("3")}, {q("-2")}}) == alloc({{0, 0}, {1, 0}}));
    CHECK(expand_family(spec, 2, 1).size() == 2);
}

TEST_CASE("explicit families need not be downward-closed")
{
    const auto spec = FeasibilitySpec::explicit_family({alloc({{0, 0}, {1, 0}}), alloc({{1, 1}})});
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("1"), q("0")}, {q("-1/2"), q("1/4")}}) ==
          alloc({{0, 0}, {1, 0}}));
    CHECK(max_weight_allocation(spec, WeightMatrix{{q("-1"), q("0")}, {q("-1"), q("-1/4")}}) == alloc({{1, 1}}));
    CHECK_FALSE(validate_allocation(spec, Allocation{}, 2, 2));
    CHECK_THROWS_AS(FeasibilitySpec::explicit_family({}).validate(2, 2), FeasibilityError);
    CHECK_THROWS_AS(FeasibilitySpec::explicit_family({alloc({{2, 0}})}).validate(2, 2), FeasibilityError);
}

TEST_CASE("built-in kinds agree with brute force over random weights")
{
    std::mt19937_64 rng(7);
    const std::vector<FeasibilitySpec> specs{FeasibilitySpec::per_item_supply(),
                                             FeasibilitySpec::unit_demand_matching(),
                                             FeasibilitySpec::public_project()};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng() % 3;
        const std::size_t n = 1 + rng() % 3;
        WeightMatrix w(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                w(i, j) = Rational(static_cast<long>(rng() % 11) - 5, 3);
            }
        }
        for (const auto& spec : specs) {
            const Allocation got = max_weight_allocation(spec, w);
            CHECK(validate_allocation(spec, got, m, n));
            CHECK(w.weight_of(got) == w.weight_of(brute_max(spec, w)));
        }
    }
}

TEST_CASE("negative weight adapter on a matching solver")
{
    auto solver = negative_weight_adapter([](const WeightMatrix& w) {
        return max_weight_matching_nonnegative(w);
    });
    WeightMatrix w{{q("-1"), q("2")}, {q("3"), q("-4")}};
    CHECK(solver(w) == alloc({{0, 1}, {1, 0}}));
    WeightMatrix all_negative{{q("-1"), q("-2")}, {q("-3"), q("-4")}};
    CHECK(solver(all_negative).empty());
    CHECK_THROWS(max_weight_matching_nonnegative(all_negative));
}

TEST_CASE("feasibility JSON round trip")
{
    const std::vector<FeasibilitySpec> specs{
        FeasibilitySpec::single_item(false), FeasibilitySpec::per_item_supply(),
        FeasibilitySpec::unit_demand_matching(), FeasibilitySpec::public_project(),
        FeasibilitySpec::explicit_family({Allocation{}, alloc({{0, 0}, {1, 1}})})};
    for (const auto& spec : specs) {
        CHECK(feasibility_from_json(to_json(spec)) == spec);
    }
    CHECK_THROWS_AS(feasibility_from_json(nlohmann::json{{"kind", "knapsack"}}), FeasibilityError);
}
