#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "revmech/sampling.hpp"
#include "revmech/vvcg.hpp"

using namespace revmech;
using fixtures::q;

namespace {

SamplingOptions explicit_options(std::size_t k, std::size_t k_prime)
{
    SamplingOptions options;
    options.k = k;
    options.k_prime = k_prime;
    return options;
}

}  // namespace

TEST_CASE("I1 with k = 8, k' = 1 gives 12 profiles at 1/12 each")
{
    const Instance inst = fixtures::i1();
    const ProxyDistribution proxy = build_proxy(inst, explicit_options(8, 1), 7);
    REQUIRE(proxy.profiles.size() == 12);
    std::size_t direct = 0;
    for (const auto& p : proxy.provenance) {
        direct += p.direct ? 1 : 0;
    }
    CHECK(direct == 8);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            std::size_t conditioned = 0;
            for (std::size_t s = 0; s < proxy.profiles.size(); ++s) {
                if (!proxy.provenance[s].direct && proxy.provenance[s].bidder == i && proxy.provenance[s].type == a) {
                    ++conditioned;
                    CHECK(proxy.profiles[s][i] == a);
                }
            }
            CHECK(conditioned == 1);
        }
    }

    const Instance prime = proxy_instance(proxy, inst);
    Rational total = 0;
    for (const auto& wp : prime.profile_space()) {
        CHECK(wp.probability * 12 == Rational(static_cast<long>(std::count(proxy.profiles.begin(), proxy.profiles.end(), wp.profile))));
        total += wp.probability;
    }
    CHECK(total == 1);
    CHECK(prime.type_spaces() == inst.type_spaces());
    CHECK(prime.feasibility() == inst.feasibility());
}

TEST_CASE("proxy construction is deterministic per seed")
{
    const Instance inst = fixtures::i1();
    const auto a = build_proxy(inst, explicit_options(20, 2), 11);
    const auto b = build_proxy(inst, explicit_options(20, 2), 11);
    const auto c = build_proxy(inst, explicit_options(20, 2), 12);
    CHECK(a == b);
    CHECK(a.profiles != c.profiles);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a)["generator"] == "mt19937_64");
}

TEST_CASE("genuine/biased split against a hand tally")
{
    const Instance inst = fixtures::i1();
    const auto proxy = build_proxy(inst, explicit_options(8, 1), 3);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            const auto split = genuine_biased_split(proxy, i, a);
            CHECK(split.genuine.size() >= 1);
            std::size_t with_type = 0, genuine = 0;
            for (std::size_t s = 0; s < proxy.profiles.size(); ++s) {
                if (proxy.profiles[s][i] == a) {
                    ++with_type;
                    const auto& p = proxy.provenance[s];
                    genuine += (p.direct || p.bidder == i) ? 1 : 0;
                }
            }
            CHECK(split.genuine.size() + split.biased.size() == with_type);
            CHECK(split.genuine.size() == genuine);
        }
    }
}

TEST_CASE("genuine set has at least k' entries on random instances")
{
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
        const Instance inst = fixtures::random_instance(rng);
        const std::size_t k_prime = 1 + rng() % 3;
        const auto proxy = build_proxy(inst, explicit_options(k_prime * inst.total_types() + 1, k_prime), rng());
        CHECK(proxy.profiles.size() == proxy.parameters.total(inst.total_types()));
        for (std::size_t i = 0; i < inst.bidders(); ++i) {
            for (std::size_t a = 0; a < inst.num_types(i); ++a) {
                const auto split = genuine_biased_split(proxy, i, a);
                CHECK(split.genuine.size() >= k_prime);
                if (inst.bidders() == 1) {
                    CHECK(split.biased.empty());
                }
            }
        }
    }
}

TEST_CASE("single bidder never has biased samples")
{
    const auto proxy = build_proxy(fixtures::i3(), explicit_options(10, 3), 1);
    for (std::size_t a = 0; a < 2; ++a) {
        CHECK(genuine_biased_split(proxy, 0, a).biased.empty());
    }
}

TEST_CASE("k = 0 testing configuration")
{
    const Instance inst = fixtures::i1();
    SamplingOptions options = explicit_options(0, 2);
    CHECK_THROWS_AS(build_proxy(inst, options, 1), SamplingError);
    options.allow_small_k = true;
    const auto proxy = build_proxy(inst, options, 1);
    CHECK(proxy.profiles.size() == 8);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            const auto split = genuine_biased_split(proxy, i, a);
            CHECK(split.genuine.size() == 2);
            for (std::size_t s : split.biased) {
                CHECK(!proxy.provenance[s].direct);
                CHECK(proxy.provenance[s].bidder != i);
                CHECK(proxy.profiles[s][i] == a);
            }
        }
    }
}

TEST_CASE("parameter validation")
{
    const Instance inst = fixtures::i1();
    CHECK_THROWS_AS(build_proxy(inst, explicit_options(4, 1), 1), SamplingError);
    CHECK_THROWS_AS(build_proxy(inst, explicit_options(10, 0), 1), SamplingError);
    CHECK_NOTHROW(build_proxy(inst, explicit_options(5, 1), 1));
    CHECK_THROWS_AS(resolve_parameters(inst, SamplingOptions{}), SamplingError);

    SamplingOptions eps;
    eps.epsilon = q("1/2");
    const auto params = resolve_parameters(inst, eps);
    CHECK(params.heuristic);
    CHECK(params.k_prime_capped);
    CHECK(params.k_prime == 1000);
    CHECK(*params.t == q("1/48"));
    CHECK(params.k == 4 * 1000 * 4 * 2);
    CHECK(to_json(params).contains("note"));

    const Instance corr = Instance::correlated(inst.type_spaces(), inst.profile_space(), 1, inst.feasibility());
    CHECK_THROWS_AS(build_proxy(corr, explicit_options(8, 1), 1), SamplingError);
}

TEST_CASE("categorical draws follow the rational CDF")
{
    SampleStream stream(99);
    const RationalVector p{q("1/4"), q("3/4")};
    std::size_t ones = 0;
    for (int s = 0; s < 4000; ++s) {
        ones += stream.categorical(p);
    }
    CHECK(ones > 2800);
    CHECK(ones < 3200);
}

TEST_CASE("proxy reduced form of a fixed rule is close to the true one")
{
    const Instance inst = fixtures::i1();
    const auto rule = simple_rule(WeightVector(RationalVector{q("1/4"), q("1"), q("1/2"), q("3/4")}), inst);
    const ReducedForm truth = reduced_form_of(rule, inst);
    const auto f = virtual_weights(rule.weights, inst);
    const auto proxy = build_proxy(inst, explicit_options(2000, 100), 4);
    const Instance prime = proxy_instance(proxy, inst);
    const ReducedForm sampled = reduced_form_of(rule_from_virtual_weights(f, prime), prime);
    for (std::size_t k = 0; k < truth.size(); ++k) {
        CHECK(abs(truth[k] - sampled[k]) <= q("1/10"));
    }
}
