#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revmech/geometry.hpp"
#include "revmech/model.hpp"
#include "revmech/sampling.hpp"

namespace revmech {

class OptimizerError : public std::runtime_error
{
public:
    explicit OptimizerError(const std::string& what) : std::runtime_error(what) {}
};

/// Interim expected payments in normalized value units.
struct PricingRule
{
    std::vector<RationalVector> prices;  // prices[i][A]

    static PricingRule zero(const Instance& instance);

    friend bool operator==(const PricingRule&, const PricingRule&) = default;
};

struct RevenueOptions
{
    Rational delta = 0;
    /// When set, feasibility of pi is tested against this instance's polytope
    /// (a proxy over the same type spaces); the objective still uses the true marginals.
    const Instance* proxy = nullptr;
    std::optional<RationalVector> budgets;  // normalized units
    GeometryOptions geometry;
};

struct RevenueSolution
{
    ReducedForm reduced_form;
    PricingRule prices;
    Rational revenue;
    std::size_t cuts = 0;
};

/// max sum_i sum_A Pr[t_i = A] p_i(A) over reduced forms in the polytope,
/// delta-relaxed BIC, interim IR and optional budget rows. Independent instances only.
RevenueSolution solve_revenue_lp(const Instance& instance, const RevenueOptions& options = {});

struct MechanismMetadata
{
    std::string mode;  // "exact" or "sampling"
    std::optional<Rational> epsilon;
    std::optional<std::uint64_t> seed;
    std::optional<ProxyParameters> proxy;
    std::size_t proxy_support = 0;
    Rational lp_revenue;
    std::size_t lp_cuts = 0;
};

/// Decomposition weights are expressed against the true distribution, so
/// run_vvcg(component.rule, instance, profile) executes the mechanism.
struct Mechanism
{
    Decomposition decomposition;
    PricingRule prices;
    Rational delta;
    MechanismMetadata metadata;
};

enum class PipelineMode
{
    automatic,
    exact,
    sampling,
};

struct PipelineOptions
{
    Rational epsilon;
    std::optional<Rational> delta;  // default epsilon / (2m)
    std::optional<RationalVector> budgets;
    PipelineMode mode = PipelineMode::automatic;
    SamplingOptions sampling;  // epsilon defaults to the pipeline's
    std::uint64_t seed = 0;
    /// Automatic mode is exact when the support has at most this many profiles
    /// and no explicit k / k' was given.
    std::size_t exact_cap = 1'000'000;
    GeometryOptions geometry;
};

Mechanism run_pipeline(const Instance& instance, const PipelineOptions& options);

/// Reduced form of the mechanism's allocation rule on `instance`.
ReducedForm reduced_form_of(const Mechanism& mechanism, const Instance& instance);
/// sum_i sum_A Pr[t_i = A] p_i(A)
Rational expected_revenue(const PricingRule& prices, const Instance& instance);

struct RegretEntry
{
    std::size_t bidder = 0;
    std::size_t truth = 0;
    std::size_t report = 0;
    Rational gain;        // utility of reporting `report` minus utility of truth
    Rational normalizer;  // max{1, sum_j pi_ij(report)}
    Rational normalized;
};

struct RegretReport
{
    std::vector<RegretEntry> entries;
    Rational worst_normalized;  // clamped at 0
    Rational worst_raw;         // clamped at 0
};

RegretReport bic_regret(const ReducedForm& pi, const PricingRule& prices, const Instance& instance);
RegretReport bic_regret(const Mechanism& mechanism, const Instance& instance);

struct IrReport
{
    bool ok = true;
    Rational worst_slack;  // min over (i, A) of pi_i(A).v(A) - p_i(A)
    std::size_t bidder = 0;
    std::size_t type = 0;
};

IrReport ir_check(const ReducedForm& pi, const PricingRule& prices, const Instance& instance);
IrReport ir_check(const Mechanism& mechanism, const Instance& instance);

struct BidderStats
{
    Rational mean_payment;
    double payment_stddev = 0;
    Rational allocation_rate;  // items won per trial
};

struct SimulationReport
{
    std::size_t trials = 0;
    std::optional<Rational> mean_revenue;  // empty when trials = 0
    double revenue_stddev = 0;
    std::vector<BidderStats> bidders;
};

/// Draws profiles from `instance`, a component by its probability, runs it and
/// charges the interim prices. Deterministic per seed.
SimulationReport simulate(const Mechanism& mechanism, const Instance& instance, std::size_t trials,
                          std::uint64_t seed);

nlohmann::json to_json(const Mechanism& mechanism, const Instance& instance);
/// Restores decomposition, prices, delta and the scalar metadata fields.
Mechanism mechanism_from_json(const nlohmann::json& document);
nlohmann::json to_json(const RegretReport& report);
nlohmann::json to_json(const IrReport& report);
nlohmann::json to_json(const SimulationReport& report);

}  // namespace revmech
