#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "revmech/model.hpp"

namespace revmech {

class SamplingError : public std::runtime_error
{
public:
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic 64-bit stream with exact categorical draws: u = next() / 2^64
/// is compared against the exact rational CDF.
class SampleStream
{
public:
    explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

    static constexpr const char* algorithm = "mt19937_64";

    std::uint64_t next() { return engine_(); }
    /// Index drawn from `probabilities` (positive, summing to 1).
    std::size_t categorical(const RationalVector& probabilities);
    /// Index drawn from the weights of `profiles`.
    std::size_t categorical(const std::vector<WeightedProfile>& profiles);

private:
    std::mt19937_64 engine_;
};

struct Provenance
{
    bool direct = true;
    std::size_t bidder = 0;  // conditioned entries only
    std::size_t type = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SamplingOptions
{
    std::optional<Rational> epsilon;
    std::optional<std::size_t> k;
    std::optional<std::size_t> k_prime;
    std::size_t k_prime_cap = 1000;
    /// Testing only: skip the k > k' * sum|T_i| requirement.
    bool allow_small_k = false;
};

struct ProxyParameters
{
    std::size_t k = 0;
    std::size_t k_prime = 0;
    std::optional<Rational> epsilon;
    std::optional<Rational> t;  // epsilon / (6 T) when epsilon is known
    bool heuristic = false;     // k, k' came from the built-in default formulas
    bool k_prime_capped = false;

    std::size_t total(std::size_t total_types) const { return k + k_prime * total_types; }

    friend bool operator==(const ProxyParameters&, const ProxyParameters&) = default;
};

struct ProxyDistribution
{
    std::vector<Profile> profiles;  // k direct samples, then k' per (i, A)
    std::vector<Provenance> provenance;
    std::uint64_t seed = 0;
    ProxyParameters parameters;

    friend bool operator==(const ProxyDistribution&, const ProxyDistribution&) = default;
};

/// Resolves k and k'. With only epsilon: t = eps / (6T), k' = ceil(T^2 n^2 / t^3)
/// capped at options.k_prime_cap, k = ceil(4 k' T / eps).
ProxyParameters resolve_parameters(const Instance& instance, const SamplingOptions& options);

/// Samples the proxy profiles. Independent instances only.
ProxyDistribution build_proxy(const Instance& instance, const SamplingOptions& options, std::uint64_t seed);

/// The uniform distribution over the sampled list, as a correlated instance over
/// its distinct profiles (probability = multiplicity / list length). Types,
/// feasibility, budgets and scale are copied from `instance`.
Instance proxy_instance(const ProxyDistribution& proxy, const Instance& instance);

struct GenuineBiasedSplit
{
    std::vector<std::size_t> genuine;  // t_i = A and direct or conditioned on (i, A)
    std::vector<std::size_t> biased;   // t_i = A and conditioned on another bidder
};

GenuineBiasedSplit genuine_biased_split(const ProxyDistribution& proxy, std::size_t bidder, std::size_t type);

nlohmann::json to_json(const ProxyDistribution& proxy);
nlohmann::json to_json(const ProxyParameters& parameters);

}  // namespace revmech
