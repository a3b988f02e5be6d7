#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "revmech/bruteforce.hpp"

using namespace revmech;
using fixtures::q;

namespace {

Instance with_family(const Instance& base, FeasibilitySpec spec)
{
    return Instance::independent(base.type_spaces(), base.marginals(), base.items(), std::move(spec));
}

const FeasibilitySpec small_family = FeasibilitySpec::explicit_family(
    {Allocation{}, Allocation({{0, 0}}), Allocation({{1, 0}})});

}  // namespace

TEST_CASE("rule counts")
{
    const Instance i2 = with_family(fixtures::i2(), small_family);
    CHECK(count_deterministic_rules(i2) == std::optional<std::size_t>(3));
    const auto rules = enumerate_deterministic_rules(i2);
    CHECK(rules.size() == 3);
    std::set<RationalVector> forms;
    for_each_deterministic_rule(i2, [&](const DeterministicRule&, const ReducedForm& pi) { forms.insert(pi.entries); });
    CHECK(forms == std::set<RationalVector>{{Rational(0), Rational(0)}, {Rational(1), Rational(0)},
                                            {Rational(0), Rational(1)}});

    const Instance i1 = with_family(fixtures::i1(), small_family);
    CHECK(count_deterministic_rules(i1) == std::optional<std::size_t>(81));
    CHECK(enumerate_deterministic_rules(i1).size() == 81);
    CHECK_FALSE(count_deterministic_rules(i1, 80).has_value());
    CHECK_THROWS_AS(enumerate_deterministic_rules(i1, 80), EnumerationError);
}

TEST_CASE("distinct reduced forms match the full enumeration")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = fixtures::random_instance(rng, {2, 2, 2, 4});
        std::set<RationalVector> all;
        for_each_deterministic_rule(inst, [&](const DeterministicRule& rule, const ReducedForm& pi) {
            all.insert(pi.entries);
            CHECK(reduced_form_of([&](const Profile& v) { return rule(v); }, inst) == pi);
        });
        std::set<RationalVector> distinct;
        for (const auto& pi : distinct_reduced_forms(inst)) {
            distinct.insert(pi.entries);
        }
        CHECK(all == distinct);
    }
}

TEST_CASE("membership examples")
{
    const Instance i2 = with_family(fixtures::i2(), small_family);
    const ReducedForm half({q("1/2"), q("1/2")});
    const MembershipResult m = membership_lp(half, i2);
    CHECK(m.member);
    REQUIRE(m.implementation.size() == 1);
    Rational total = 0;
    for (const auto& [alloc, p] : m.implementation[0].lottery) {
        total += p;
    }
    CHECK(total == 1);
    const HullMembership h = hull_membership(half, i2);
    CHECK(h.member);
    CHECK_FALSE(membership_lp(ReducedForm({q("3/4"), q("3/4")}), i2).member);
    CHECK_FALSE(hull_membership(ReducedForm({q("3/4"), q("3/4")}), i2).member);
    for (const auto& corner : distinct_reduced_forms(i2)) {
        CHECK(membership_lp(corner, i2).member);
    }
}

TEST_CASE("per-profile membership agrees with the hull of enumerated rules")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = fixtures::random_instance(rng, {2, 2, 2, 4});
        ReducedForm pi(RationalVector(inst.dimension()));
        for (auto& x : pi.entries) {
            x = Rational(static_cast<long>(rng() % 3), 2);
        }
        CHECK(membership_lp(pi, inst).member == hull_membership(pi, inst).member);
    }
}

TEST_CASE("per-profile revenue optimum")
{
    CHECK(optimal_per_profile_lp(fixtures::i3()).revenue == q("1/2"));
    const auto budgeted = optimal_per_profile_lp(fixtures::i3(), RationalVector{q("1/4")});
    CHECK(budgeted.revenue == q("1/4"));
    for (const auto& p : budgeted.prices[0]) {
        CHECK(p <= q("1/4"));
    }
    const Instance one = Instance::independent({{fixtures::type_of({"1"})}}, {{q("1")}}, 1,
                                               FeasibilitySpec::explicit_family({Allocation({{0, 0}})}));
    const auto sure = optimal_per_profile_lp(one);
    CHECK(sure.revenue == 1);
    CHECK(sure.prices[0][0] == 1);
}

TEST_CASE("second-order polytope corners")
{
    std::mt19937_64 rng(47);
    const Instance ind = fixtures::random_instance(rng, {2, 1, 2, 3});
    for (const auto& pi : enumerate_sorf_polytope(ind)) {
        for (std::size_t i = 0; i < ind.bidders(); ++i) {
            for (std::size_t a = 0; a < ind.num_types(i); ++a) {
                for (std::size_t b = 0; b < ind.num_types(i); ++b) {
                    for (std::size_t j = 0; j < ind.items(); ++j) {
                        CHECK(pi[ind.second_order_coordinate(i, a, b, j)] ==
                              pi[ind.second_order_coordinate(i, a, 0, j)]);
                    }
                }
            }
        }
    }

    std::vector<BidderType> types{fixtures::type_of({"1/2"}), fixtures::type_of({"1"})};
    const Instance point_mass = Instance::correlated({types, types}, {{{0, 0}, q("1/2")}, {{1, 1}, q("1/2")}}, 1,
                                                     FeasibilitySpec::single_item());
    const auto corners = enumerate_sorf_polytope(point_mass);
    for (const auto& pi : corners) {
        for (const auto& x : pi.entries) {
            CHECK((x == 0 || x == 1));
        }
    }
    CHECK(std::find(corners.begin(), corners.end(),
                    SecondOrderReducedForm(RationalVector(point_mass.second_order_dimension(), Rational(0)))) !=
          corners.end());
}

TEST_CASE("unique argmax detects ties")
{
    const std::vector<Allocation> family{Allocation({{0, 0}}), Allocation({{1, 0}})};
    CHECK_FALSE(unique_argmax(family, WeightMatrix{{q("1")}, {q("1")}}).has_value());
    CHECK(unique_argmax(family, WeightMatrix{{q("1")}, {q("2")}}) == Allocation({{1, 0}}));
    CHECK_FALSE(is_simple(VirtualVcgRule{WeightVector({q("1"), q("1")}), false}, fixtures::i2()));
    CHECK(is_simple(simple_rule(WeightVector({q("1"), q("1")}), fixtures::i2()), fixtures::i2()));
}
