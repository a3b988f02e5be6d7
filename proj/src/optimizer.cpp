#include "revmech/optimizer.hpp"

#include <cmath>

#include "revmech/ratlp.hpp"
#include "revmech/vvcg.hpp"

namespace revmech {

namespace {

// Index of p_i(A) among the price variables.
std::vector<std::size_t> type_offsets(const Instance& instance)
{
    std::vector<std::size_t> offset(instance.bidders() + 1, 0);
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        offset[i + 1] = offset[i] + instance.num_types(i);
    }
    return offset;
}

// sum_j v_j(truth) pi_ij(report)
Rational value_of(const ReducedForm& pi, const Instance& instance, std::size_t i, std::size_t truth,
                  std::size_t report)
{
    Rational total = 0;
    const auto& values = instance.type(i, truth).values;
    for (std::size_t j = 0; j < instance.items(); ++j) {
        total += values[j] * pi[instance.coordinate(i, report, j)];
    }
    return total;
}

void check_prices(const PricingRule& prices, const Instance& instance)
{
    if (prices.prices.size() != instance.bidders()) {
        throw OptimizerError("pricing rule has " + std::to_string(prices.prices.size()) + " bidders, instance has " +
                             std::to_string(instance.bidders()));
    }
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        if (prices.prices[i].size() != instance.num_types(i)) {
            throw OptimizerError("pricing rule for bidder " + std::to_string(i) + " has the wrong number of types");
        }
    }
}

// Decomposition weights from `source` marginals re-expressed against `target`
// marginals, keeping the virtual weights f (and so every allocation) unchanged.
Decomposition reweight(const Decomposition& decomposition, const Instance& source, const Instance& target)
{
    Decomposition out;
    for (const auto& component : decomposition.components) {
        const WeightVector f = virtual_weights(component.rule.weights, source);
        WeightVector w = f;
        for (std::size_t i = 0; i < target.bidders(); ++i) {
            for (std::size_t a = 0; a < target.num_types(i); ++a) {
                for (std::size_t j = 0; j < target.items(); ++j) {
                    w[target.coordinate(i, a, j)] *= target.type_probability(i, a);
                }
            }
        }
        out.components.push_back({component.probability, VirtualVcgRule{std::move(w), component.rule.perturbed}});
    }
    return out;
}

double stddev(double sum, double sum_squares, std::size_t n)
{
    if (n < 2) {
        return 0;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = (sum_squares - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    return var > 0 ? std::sqrt(var) : 0;
}

nlohmann::json price_table(const PricingRule& prices, const Rational& scale)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : prices.prices) {
        RationalVector scaled;
        for (const auto& p : row) {
            scaled.push_back(p * scale);
        }
        out.push_back(rational_strings(scaled));
    }
    return out;
}

}  // namespace

PricingRule PricingRule::zero(const Instance& instance)
{
    PricingRule rule;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        rule.prices.emplace_back(instance.num_types(i), Rational(0));
    }
    return rule;
}

RevenueSolution solve_revenue_lp(const Instance& instance, const RevenueOptions& options)
{
    if (!instance.is_independent()) {
        throw OptimizerError("revenue optimization requires an independent instance");
    }
    if (options.delta < 0) {
        throw OptimizerError("delta must be non-negative");
    }
    if (options.budgets && options.budgets->size() != instance.bidders()) {
        throw OptimizerError("expected one budget per bidder");
    }
    const Instance& target = options.proxy ? *options.proxy : instance;
    if (target.dimension() != instance.dimension() || target.type_spaces() != instance.type_spaces()) {
        throw OptimizerError("proxy instance does not match the type spaces");
    }

    const std::size_t d = instance.dimension();
    const std::size_t m = instance.bidders();
    const std::size_t n = instance.items();
    const auto offset = type_offsets(instance);

    LinearProgram lp;
    for (std::size_t k = 0; k < d; ++k) {
        lp.add_variable("pi" + std::to_string(k), Rational(0), Rational(1));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            lp.add_variable("p" + std::to_string(i) + "_" + std::to_string(a), std::nullopt, std::nullopt);
        }
    }
    const std::size_t vars = lp.num_variables();
    auto price = [&](std::size_t i, std::size_t a) { return d + offset[i] + a; };

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            const auto& v = instance.type(i, a).values;
            // IR: v(A).pi_i(A) - p_i(A) >= 0
            RationalVector ir(vars, Rational(0));
            for (std::size_t j = 0; j < n; ++j) {
                ir[instance.coordinate(i, a, j)] = v[j];
            }
            ir[price(i, a)] = -1;
            lp.add_constraint(ir, Relation::greater_equal, Rational(0));
            for (std::size_t b = 0; b < instance.num_types(i); ++b) {
                if (b == a) {
                    continue;
                }
                RationalVector bic = ir;
                for (std::size_t j = 0; j < n; ++j) {
                    bic[instance.coordinate(i, b, j)] -= v[j];
                }
                bic[price(i, b)] += 1;
                lp.add_constraint(std::move(bic), Relation::greater_equal, -options.delta);
            }
            if (options.budgets) {
                RationalVector row(vars, Rational(0));
                row[price(i, a)] = 1;
                lp.add_constraint(std::move(row), Relation::less_equal, (*options.budgets)[i]);
            }
        }
    }

    RationalVector objective(vars, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            objective[price(i, a)] = instance.type_probability(i, a);
        }
    }
    lp.set_objective(Sense::maximize, std::move(objective));

    const PolytopeOracle polytope = reduced_form_polytope(target);
    auto oracle = [&](std::span<const Rational> x) -> std::optional<Hyperplane> {
        const RationalVector pi(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
        const FeasibilityVerdict verdict = separation_oracle(polytope, pi, options.geometry);
        if (verdict.feasible) {
            return std::nullopt;
        }
        RationalVector normal(vars, Rational(0));
        std::copy(verdict.witness->weights.begin(), verdict.witness->weights.end(), normal.begin());
        return Hyperplane{std::move(normal), verdict.witness->value};
    };
    OracleOptions lp_options;
    lp_options.trace = options.geometry.trace;
    const OracleSolution result = solve_with_oracle(lp, oracle, lp_options);
    if (result.solution.status != LpStatus::optimal) {
        throw OptimizerError("revenue LP is " + to_string(result.solution.status));
    }

    RevenueSolution out;
    out.reduced_form = ReducedForm(RationalVector(result.solution.point.begin(), result.solution.point.begin() + d));
    out.prices = PricingRule::zero(instance);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            out.prices.prices[i][a] = result.solution.point[price(i, a)];
        }
    }
    out.revenue = result.solution.value;
    out.cuts = result.cuts.size();
    return out;
}

Mechanism run_pipeline(const Instance& instance, const PipelineOptions& options)
{
    if (!instance.is_independent()) {
        throw OptimizerError("the pipeline requires an independent instance");
    }
    if (options.epsilon <= 0 && !options.delta) {
        throw OptimizerError("epsilon must be positive");
    }
    Mechanism mech;
    mech.delta = options.delta ? *options.delta : options.epsilon / Rational(static_cast<long>(2 * instance.bidders()));
    if (options.epsilon > 0) {
        mech.metadata.epsilon = options.epsilon;
    }

    bool exact = false;
    switch (options.mode) {
    case PipelineMode::exact:
        exact = true;
        break;
    case PipelineMode::sampling:
        break;
    case PipelineMode::automatic:
        exact = !options.sampling.k && !options.sampling.k_prime && instance.support_size() <= options.exact_cap;
        break;
    }

    RevenueOptions lp_options;
    lp_options.delta = mech.delta;
    lp_options.budgets = options.budgets;
    lp_options.geometry = options.geometry;

    std::optional<Instance> proxy;
    if (exact) {
        mech.metadata.mode = "exact";
    } else {
        SamplingOptions sampling = options.sampling;
        if (!sampling.epsilon && options.epsilon > 0) {
            sampling.epsilon = options.epsilon;
        }
        const ProxyDistribution draw = build_proxy(instance, sampling, options.seed);
        proxy = proxy_instance(draw, instance);
        lp_options.proxy = &*proxy;
        mech.metadata.mode = "sampling";
        mech.metadata.seed = options.seed;
        mech.metadata.proxy = draw.parameters;
        mech.metadata.proxy_support = proxy->support_size();
    }

    const RevenueSolution lp = solve_revenue_lp(instance, lp_options);
    mech.metadata.lp_revenue = lp.revenue;
    mech.metadata.lp_cuts = lp.cuts;

    const Instance& target = proxy ? *proxy : instance;
    Decomposition decomposition = decompose(lp.reduced_form, target, options.geometry);
    if (reduced_form_of(decomposition, target) != lp.reduced_form) {
        throw GeometryFault("decomposition does not recombine to the LP reduced form");
    }
    mech.decomposition = proxy ? reweight(decomposition, *proxy, instance) : std::move(decomposition);

    mech.prices = lp.prices;
    for (auto& row : mech.prices.prices) {
        for (auto& p : row) {
            p -= mech.delta;
        }
    }
    return mech;
}

ReducedForm reduced_form_of(const Mechanism& mechanism, const Instance& instance)
{
    return reduced_form_of(mechanism.decomposition, instance);
}

Rational expected_revenue(const PricingRule& prices, const Instance& instance)
{
    check_prices(prices, instance);
    Rational total = 0;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            total += instance.type_probability(i, a) * prices.prices[i][a];
        }
    }
    return total;
}

RegretReport bic_regret(const ReducedForm& pi, const PricingRule& prices, const Instance& instance)
{
    check_prices(prices, instance);
    if (pi.size() != instance.dimension()) {
        throw OptimizerError("reduced form has the wrong dimension");
    }
    RegretReport report;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            const Rational truthful = value_of(pi, instance, i, a, a) - prices.prices[i][a];
            for (std::size_t b = 0; b < instance.num_types(i); ++b) {
                if (b == a) {
                    continue;
                }
                RegretEntry entry{i, a, b, value_of(pi, instance, i, a, b) - prices.prices[i][b] - truthful, 1, 0};
                Rational mass = 0;
                for (std::size_t j = 0; j < instance.items(); ++j) {
                    mass += pi[instance.coordinate(i, b, j)];
                }
                if (mass > entry.normalizer) {
                    entry.normalizer = mass;
                }
                entry.normalized = entry.gain / entry.normalizer;
                report.worst_normalized = std::max(report.worst_normalized, entry.normalized);
                report.worst_raw = std::max(report.worst_raw, entry.gain);
                report.entries.push_back(std::move(entry));
            }
        }
    }
    return report;
}

RegretReport bic_regret(const Mechanism& mechanism, const Instance& instance)
{
    return bic_regret(reduced_form_of(mechanism, instance), mechanism.prices, instance);
}

IrReport ir_check(const ReducedForm& pi, const PricingRule& prices, const Instance& instance)
{
    check_prices(prices, instance);
    IrReport report;
    bool first = true;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            Rational slack = value_of(pi, instance, i, a, a) - prices.prices[i][a];
            if (first || slack < report.worst_slack) {
                report.worst_slack = std::move(slack);
                report.bidder = i;
                report.type = a;
                first = false;
            }
        }
    }
    report.ok = report.worst_slack >= 0;
    return report;
}

IrReport ir_check(const Mechanism& mechanism, const Instance& instance)
{
    return ir_check(reduced_form_of(mechanism, instance), mechanism.prices, instance);
}

SimulationReport simulate(const Mechanism& mechanism, const Instance& instance, std::size_t trials,
                          std::uint64_t seed)
{
    check_prices(mechanism.prices, instance);
    SimulationReport report;
    report.trials = trials;
    if (trials == 0) {
        return report;
    }
    if (mechanism.decomposition.components.empty()) {
        throw OptimizerError("mechanism has no components");
    }
    const std::size_t m = instance.bidders();
    std::vector<AllocationRule> rules;
    RationalVector component_probability;
    for (const auto& component : mechanism.decomposition.components) {
        rules.push_back(as_allocation_rule(component.rule, instance));
        component_probability.push_back(component.probability);
    }
    const std::vector<WeightedProfile> joint = instance.is_independent() ? std::vector<WeightedProfile>{}
                                                                         : instance.profile_space();

    SampleStream stream(seed);
    Rational revenue_total = 0;
    double revenue_sum = 0, revenue_squares = 0;
    std::vector<Rational> paid(m, Rational(0));
    std::vector<double> paid_sum(m, 0), paid_squares(m, 0);
    std::vector<std::size_t> won(m, 0);
    Profile profile(m);
    for (std::size_t s = 0; s < trials; ++s) {
        if (instance.is_independent()) {
            for (std::size_t i = 0; i < m; ++i) {
                profile[i] = stream.categorical(instance.marginals()[i]);
            }
        } else {
            profile = joint[stream.categorical(joint)].profile;
        }
        const Allocation alloc = rules[stream.categorical(component_probability)](profile);
        for (const auto& a : alloc.assignments()) {
            ++won[a.bidder];
        }
        Rational revenue = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const Rational& p = mechanism.prices.prices[i][profile[i]];
            paid[i] += p;
            const double x = to_double(p);
            paid_sum[i] += x;
            paid_squares[i] += x * x;
            revenue += p;
        }
        revenue_total += revenue;
        const double r = to_double(revenue);
        revenue_sum += r;
        revenue_squares += r * r;
    }
    const Rational count(static_cast<long>(trials));
    report.mean_revenue = revenue_total / count;
    report.revenue_stddev = stddev(revenue_sum, revenue_squares, trials);
    for (std::size_t i = 0; i < m; ++i) {
        report.bidders.push_back({paid[i] / count, stddev(paid_sum[i], paid_squares[i], trials),
                                  Rational(static_cast<long>(won[i])) / count});
    }
    return report;
}

nlohmann::json to_json(const Mechanism& mechanism, const Instance& instance)
{
    nlohmann::json prices = {{"normalized", nlohmann::json::array()}, {"raw", price_table(mechanism.prices, instance.scale())}};
    for (const auto& row : mechanism.prices.prices) {
        prices["normalized"].push_back(rational_strings(row));
    }
    nlohmann::json metadata = {{"mode", mechanism.metadata.mode}, {"lp_cuts", mechanism.metadata.lp_cuts}};
    put_rational(metadata, "lp_revenue", mechanism.metadata.lp_revenue);
    if (mechanism.metadata.epsilon) {
        put_rational(metadata, "epsilon", *mechanism.metadata.epsilon);
    }
    if (mechanism.metadata.seed) {
        metadata["seed"] = *mechanism.metadata.seed;
        metadata["generator"] = SampleStream::algorithm;
    }
    if (mechanism.metadata.proxy) {
        metadata["proxy"] = to_json(*mechanism.metadata.proxy);
        metadata["proxy"]["distinct_profiles"] = mechanism.metadata.proxy_support;
    }
    nlohmann::json out = {{"decomposition", to_json(mechanism.decomposition)},
                          {"prices", std::move(prices)},
                          {"metadata", std::move(metadata)}};
    put_rational(out, "delta", mechanism.delta);
    const Rational revenue = expected_revenue(mechanism.prices, instance);
    put_rational(out, "expected_revenue", revenue);
    put_rational(out, "expected_revenue_raw", revenue * instance.scale());
    return out;
}

Mechanism mechanism_from_json(const nlohmann::json& document)
{
    Mechanism mech;
    mech.decomposition = decomposition_from_json(document.at("decomposition"));
    for (const auto& row : document.at("prices").at("normalized")) {
        mech.prices.prices.push_back(rational_array_from_json(row));
    }
    mech.delta = rational_from_json(document.at("delta"));
    if (document.contains("metadata")) {
        const auto& meta = document["metadata"];
        mech.metadata.mode = meta.value("mode", "");
        mech.metadata.lp_cuts = meta.value("lp_cuts", std::size_t{0});
        if (meta.contains("lp_revenue")) {
            mech.metadata.lp_revenue = rational_from_json(meta["lp_revenue"]);
        }
        if (meta.contains("epsilon")) {
            mech.metadata.epsilon = rational_from_json(meta["epsilon"]);
        }
        if (meta.contains("seed")) {
            mech.metadata.seed = meta["seed"].get<std::uint64_t>();
        }
    }
    return mech;
}

nlohmann::json to_json(const RegretReport& report)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json entry = {{"bidder", e.bidder}, {"truth", e.truth}, {"report", e.report}};
        put_rational(entry, "gain", e.gain);
        put_rational(entry, "normalizer", e.normalizer);
        put_rational(entry, "normalized", e.normalized);
        entries.push_back(std::move(entry));
    }
    nlohmann::json out = {{"entries", std::move(entries)}};
    put_rational(out, "epsilon_hat", report.worst_normalized);
    put_rational(out, "raw_regret", report.worst_raw);
    return out;
}

nlohmann::json to_json(const IrReport& report)
{
    nlohmann::json out = {{"ok", report.ok}, {"bidder", report.bidder}, {"type", report.type}};
    put_rational(out, "worst_slack", report.worst_slack);
    return out;
}

nlohmann::json to_json(const SimulationReport& report)
{
    nlohmann::json out = {{"trials", report.trials}};
    if (!report.mean_revenue) {
        out["bidders"] = nlohmann::json::array();
        return out;
    }
    put_rational(out, "mean_revenue", *report.mean_revenue);
    out["revenue_stddev"] = report.revenue_stddev;
    nlohmann::json bidders = nlohmann::json::array();
    for (const auto& b : report.bidders) {
        nlohmann::json entry = {{"payment_stddev", b.payment_stddev}};
        put_rational(entry, "mean_payment", b.mean_payment);
        put_rational(entry, "allocation_rate", b.allocation_rate);
        bidders.push_back(std::move(entry));
    }
    out["bidders"] = std::move(bidders);
    return out;
}

}  // namespace revmech
