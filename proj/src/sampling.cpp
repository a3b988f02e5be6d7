#include "revmech/sampling.hpp"

#include <limits>
#include <map>

namespace revmech {

namespace {

Rational unit_draw(std::uint64_t bits)
{
    static const Rational two_to_64 = Rational(Integer(1) << 64);
    return Rational(Integer(bits)) / two_to_64;
}

std::size_t ceil_to_size(const Rational& x)
{
    Integer q = numerator(x) / denominator(x);
    if (Rational(q) < x) {
        ++q;
    }
    if (q > Integer(std::numeric_limits<std::size_t>::max())) {
        return std::numeric_limits<std::size_t>::max();
    }
    return q.convert_to<std::size_t>();
}

}  // namespace

std::size_t SampleStream::categorical(const RationalVector& probabilities)
{
    const Rational u = unit_draw(next());
    Rational cumulative = 0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        cumulative += probabilities[k];
        if (u < cumulative) {
            return k;
        }
    }
    return probabilities.size() - 1;
}

std::size_t SampleStream::categorical(const std::vector<WeightedProfile>& profiles)
{
    RationalVector p;
    p.reserve(profiles.size());
    for (const auto& wp : profiles) {
        p.push_back(wp.probability);
    }
    return categorical(p);
}

ProxyParameters resolve_parameters(const Instance& instance, const SamplingOptions& options)
{
    const std::size_t total_types = instance.total_types();
    ProxyParameters params;
    params.epsilon = options.epsilon;
    if (options.epsilon) {
        if (*options.epsilon <= 0) {
            throw SamplingError("epsilon must be positive");
        }
        params.t = *options.epsilon / Rational(static_cast<long>(6 * total_types));
    }
    if (options.k_prime) {
        params.k_prime = *options.k_prime;
    } else {
        if (!params.t) {
            throw SamplingError("k' needs either an explicit value or epsilon");
        }
        const Rational T(static_cast<long>(total_types));
        const Rational n(static_cast<long>(instance.items()));
        const Rational formula = T * T * n * n / (*params.t * *params.t * *params.t);
        params.k_prime = ceil_to_size(formula);
        if (params.k_prime > options.k_prime_cap) {
            params.k_prime = options.k_prime_cap;
            params.k_prime_capped = true;
        }
        params.heuristic = true;
    }
    if (options.k) {
        params.k = *options.k;
    } else {
        if (!options.epsilon) {
            throw SamplingError("k needs either an explicit value or epsilon");
        }
        params.k = ceil_to_size(4 * Rational(static_cast<long>(params.k_prime)) *
                                Rational(static_cast<long>(total_types)) / *options.epsilon);
        params.heuristic = true;
    }
    if (params.k_prime == 0) {
        throw SamplingError("k' must be at least 1");
    }
    if (!options.allow_small_k && params.k <= params.k_prime * total_types) {
        throw SamplingError("k = " + std::to_string(params.k) + " must exceed k' * sum|T_i| = " +
                            std::to_string(params.k_prime * total_types));
    }
    return params;
}

ProxyDistribution build_proxy(const Instance& instance, const SamplingOptions& options, std::uint64_t seed)
{
    if (!instance.is_independent()) {
        throw SamplingError("proxy construction requires an independent instance");
    }
    ProxyDistribution proxy;
    proxy.seed = seed;
    proxy.parameters = resolve_parameters(instance, options);
    const std::size_t m = instance.bidders();
    SampleStream stream(seed);
    auto draw_except = [&](std::size_t skip, Profile& profile) {
        for (std::size_t i = 0; i < m; ++i) {
            if (i != skip) {
                profile[i] = stream.categorical(instance.marginals()[i]);
            }
        }
    };
    const std::size_t total = proxy.parameters.total(instance.total_types());
    proxy.profiles.reserve(total);
    proxy.provenance.reserve(total);
    for (std::size_t s = 0; s < proxy.parameters.k; ++s) {
        Profile profile(m);
        draw_except(m, profile);
        proxy.profiles.push_back(std::move(profile));
        proxy.provenance.push_back({true, 0, 0});
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            for (std::size_t s = 0; s < proxy.parameters.k_prime; ++s) {
                Profile profile(m);
                draw_except(i, profile);
                profile[i] = a;
                proxy.profiles.push_back(std::move(profile));
                proxy.provenance.push_back({false, i, a});
            }
        }
    }
    return proxy;
}

Instance proxy_instance(const ProxyDistribution& proxy, const Instance& instance)
{
    if (proxy.profiles.empty()) {
        throw SamplingError("empty proxy");
    }
    std::map<Profile, std::size_t> counts;
    for (const auto& p : proxy.profiles) {
        ++counts[p];
    }
    const Rational total(static_cast<long>(proxy.profiles.size()));
    std::vector<WeightedProfile> joint;
    for (const auto& [profile, count] : counts) {
        joint.push_back({profile, Rational(static_cast<long>(count)) / total});
    }
    return Instance::correlated(instance.type_spaces(), std::move(joint), instance.items(), instance.feasibility(),
                                instance.budgets(), instance.scale());
}

GenuineBiasedSplit genuine_biased_split(const ProxyDistribution& proxy, std::size_t bidder, std::size_t type)
{
    GenuineBiasedSplit split;
    for (std::size_t s = 0; s < proxy.profiles.size(); ++s) {
        if (proxy.profiles[s][bidder] != type) {
            continue;
        }
        const Provenance& p = proxy.provenance[s];
        if (p.direct || p.bidder == bidder) {
            split.genuine.push_back(s);
        } else {
            split.biased.push_back(s);
        }
    }
    return split;
}

nlohmann::json to_json(const ProxyParameters& parameters)
{
    nlohmann::json out = {{"k", parameters.k}, {"k_prime", parameters.k_prime}, {"heuristic", parameters.heuristic}};
    if (parameters.epsilon) {
        put_rational(out, "epsilon", *parameters.epsilon);
    }
    if (parameters.t) {
        put_rational(out, "t", *parameters.t);
    }
    if (parameters.heuristic) {
        out["note"] = "k and k' from built-in default formulas, not derived from a concrete accuracy polynomial";
    }
    if (parameters.k_prime_capped) {
        out["k_prime_capped"] = true;
    }
    return out;
}

nlohmann::json to_json(const ProxyDistribution& proxy)
{
    nlohmann::json profiles = nlohmann::json::array();
    for (std::size_t s = 0; s < proxy.profiles.size(); ++s) {
        nlohmann::json provenance;
        if (proxy.provenance[s].direct) {
            provenance = "direct";
        } else {
            provenance = {{"conditioned", {{"bidder", proxy.provenance[s].bidder}, {"type", proxy.provenance[s].type}}}};
        }
        profiles.push_back({{"profile", proxy.profiles[s]}, {"provenance", std::move(provenance)}});
    }
    return {{"generator", SampleStream::algorithm},
            {"seed", proxy.seed},
            {"parameters", to_json(proxy.parameters)},
            {"profiles", std::move(profiles)}};
}

}  // namespace revmech
