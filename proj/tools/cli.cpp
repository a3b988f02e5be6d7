#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "revmech/bruteforce.hpp"
#include "revmech/geometry.hpp"
#include "revmech/model.hpp"
#include "revmech/optimizer.hpp"
#include "revmech/sampling.hpp"

namespace revmech::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error
{
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct Globals
{
    std::uint64_t seed = 0;
    bool verbose = false;
    std::size_t max_enum = default_enumeration_cap;
};

class Log
{
public:
    Log(std::ostream& err, bool verbose) : err_(err), verbose_(verbose), start_(std::chrono::steady_clock::now()) {}

    void info(const std::string& line) const { err_ << "revmech: " << line << '\n'; }
    void detail(const std::string& line) const
    {
        if (verbose_) {
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
            err_ << "revmech [" << ms.count() << " ms]: " << line << '\n';
        }
    }

private:
    std::ostream& err_;
    bool verbose_;
    std::chrono::steady_clock::time_point start_;
};

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void flatten(const json& node, RationalVector& out)
{
    if (node.is_array()) {
        for (const auto& child : node) {
            flatten(child, out);
        }
    } else {
        out.push_back(rational_from_json(node));
    }
}

// Flat array in coordinate order, or nested [bidder][type][item]; optionally
// wrapped as {"reduced_form": ...}.
ReducedForm read_reduced_form(const std::string& path, const Instance& instance)
{
    json doc = read_json(path);
    if (doc.is_object()) {
        if (!doc.contains("reduced_form")) {
            throw UsageError(path + ": expected an array or an object with \"reduced_form\"");
        }
        doc = doc["reduced_form"];
    }
    if (!doc.is_array()) {
        throw UsageError(path + ": reduced form must be an array");
    }
    RationalVector values;
    try {
        flatten(doc, values);
    } catch (const std::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (values.size() != instance.dimension()) {
        throw UsageError(path + ": reduced form has " + std::to_string(values.size()) + " entries, instance needs " +
                         std::to_string(instance.dimension()));
    }
    return ReducedForm(std::move(values));
}

Rational read_rational(const std::string& text, const char* flag)
{
    try {
        return parse_rational(text);
    } catch (const ParseError& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

RationalVector instance_budgets(const Instance& instance)
{
    if (!instance.budgets()) {
        throw UsageError("--budgets given but the instance has no budgets");
    }
    return *instance.budgets();
}

void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

json nested(const RationalVector& flat, const Instance& instance)
{
    json out = json::array();
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        json bidder = json::array();
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            RationalVector row;
            for (std::size_t j = 0; j < instance.items(); ++j) {
                row.push_back(flat[instance.coordinate(i, a, j)]);
            }
            bidder.push_back(rational_strings(row));
        }
        out.push_back(std::move(bidder));
    }
    return out;
}

json lotteries(const std::vector<ProfileDistribution>& table)
{
    json out = json::array();
    for (const auto& entry : table) {
        json lottery = json::array();
        for (const auto& [alloc, p] : entry.lottery) {
            json pairs = json::array();
            for (const auto& a : alloc.assignments()) {
                pairs.push_back({a.bidder, a.item});
            }
            json item = {{"allocation", std::move(pairs)}};
            put_rational(item, "prob", p);
            lottery.push_back(std::move(item));
        }
        out.push_back({{"profile", entry.profile}, {"lottery", std::move(lottery)}});
    }
    return out;
}

struct SamplingFlags
{
    std::string epsilon;
    std::optional<std::size_t> k;
    std::optional<std::size_t> k_prime;
    std::size_t k_prime_cap = 1000;

    void attach(CLI::App* command, bool with_epsilon)
    {
        if (with_epsilon) {
            command->add_option("--epsilon", epsilon, "accuracy parameter (rational, e.g. 1/10)");
        }
        command->add_option("--k", k, "direct samples");
        command->add_option("--k-prime", k_prime, "samples per (bidder, type)");
        command->add_option("--k-prime-cap", k_prime_cap, "cap on the default k'")->capture_default_str();
    }

    SamplingOptions options() const
    {
        SamplingOptions o;
        if (!epsilon.empty()) {
            o.epsilon = read_rational(epsilon, "--epsilon");
        }
        o.k = k;
        o.k_prime = k_prime;
        o.k_prime_cap = k_prime_cap;
        return o;
    }
};

int classify(const std::exception& e, std::ostream& err, int code)
{
    err << "revmech: " << (code == fault ? "internal fault: " : "error: ") << e.what() << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Revenue-optimal auctions through reduced forms and virtual VCG rules", "revmech"};
    app.require_subcommand(1);
    Globals globals;
    app.add_option("--seed", globals.seed, "random seed")->capture_default_str();
    app.add_flag("--verbose", globals.verbose, "progress details on stderr");
    app.add_option("--max-enum", globals.max_enum, "enumeration cap for brute-force commands")->capture_default_str();

    std::function<int(const Log&)> action;
    std::string instance_path, rf_path, mech_path, out_path;

    auto* check = app.add_subcommand("check-rf", "decide whether a reduced form is feasible");
    check->add_option("instance", instance_path)->required();
    check->add_option("reduced_form", rf_path)->required();
    check->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            const auto verdict = separation_oracle(read_reduced_form(rf_path, inst), inst);
            log.info(verdict.feasible ? "feasible" : "infeasible");
            emit(out, to_json(verdict));
            return verdict.feasible ? success : negative;
        };
    });

    auto* dec = app.add_subcommand("decompose", "write a feasible reduced form as a lottery over simple virtual VCG rules");
    dec->add_option("instance", instance_path)->required();
    dec->add_option("reduced_form", rf_path)->required();
    dec->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            const ReducedForm pi = read_reduced_form(rf_path, inst);
            const auto verdict = separation_oracle(pi, inst);
            if (!verdict.feasible) {
                log.info("infeasible, nothing to decompose");
                emit(out, to_json(verdict));
                return negative;
            }
            const Decomposition d = decompose(pi, inst);
            if (reduced_form_of(d, inst) != pi) {
                throw GeometryFault("recombined decomposition differs from the input");
            }
            log.info(std::to_string(d.components.size()) + " components, recombination exact");
            emit(out, {{"decomposition", to_json(d)}, {"components", d.components.size()}});
            return success;
        };
    });

    auto* opt = app.add_subcommand("optimize", "compute an approximately revenue-optimal mechanism");
    std::string delta_text;
    bool use_budgets = false, force_exact = false;
    std::size_t exact_cap = 1'000'000;
    SamplingFlags opt_sampling;
    opt->add_option("instance", instance_path)->required();
    opt_sampling.attach(opt, true);
    opt->get_option("--epsilon")->required();
    opt->add_option("--delta", delta_text, "override delta = epsilon / (2m)");
    opt->add_flag("--budgets", use_budgets, "enforce the instance's budgets");
    auto* exact_flag = opt->add_flag("--exact", force_exact, "separation over the true distribution");
    exact_flag->excludes(opt->get_option("--k"))->excludes(opt->get_option("--k-prime"));
    opt->add_option("--exact-cap", exact_cap, "largest support solved exactly by default")->capture_default_str();
    opt->add_option("--out", out_path, "also write the mechanism JSON here");
    opt->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            PipelineOptions options;
            options.sampling = opt_sampling.options();
            options.epsilon = *options.sampling.epsilon;
            if (options.epsilon <= 0) {
                throw UsageError("--epsilon must be positive");
            }
            if (!delta_text.empty()) {
                options.delta = read_rational(delta_text, "--delta");
                if (*options.delta < 0) {
                    throw UsageError("--delta must be non-negative");
                }
            }
            if (use_budgets) {
                options.budgets = instance_budgets(inst);
            }
            options.mode = force_exact ? PipelineMode::exact : PipelineMode::automatic;
            options.exact_cap = exact_cap;
            options.seed = globals.seed;
            const Mechanism mech = run_pipeline(inst, options);
            log.detail("mode " + mech.metadata.mode + ", " + std::to_string(mech.metadata.lp_cuts) + " LP cuts");
            const auto regret = bic_regret(mech, inst);
            const auto ir = ir_check(mech, inst);
            json doc = to_json(mech, inst);
            json checks = {{"ir_ok", ir.ok}};
            put_rational(checks, "epsilon_hat", regret.worst_normalized);
            put_rational(checks, "raw_regret", regret.worst_raw);
            put_rational(checks, "ir_worst_slack", ir.worst_slack);
            doc["checks"] = std::move(checks);
            if (!out_path.empty()) {
                std::ofstream file(out_path);
                if (!file) {
                    throw UsageError("cannot write " + out_path);
                }
                file << doc.dump(2) << '\n';
            }
            log.info("expected revenue " + to_string(expected_revenue(mech.prices, inst)) + " (" + mech.metadata.mode +
                     " mode)");
            emit(out, doc);
            return success;
        };
    });

    auto* sim = app.add_subcommand("simulate", "run a stored mechanism on sampled profiles");
    std::size_t trials = 10000;
    sim->add_option("instance", instance_path)->required();
    sim->add_option("mechanism", mech_path)->required();
    sim->add_option("--trials", trials)->capture_default_str();
    sim->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            Mechanism mech;
            try {
                mech = mechanism_from_json(read_json(mech_path));
            } catch (const json::exception& e) {
                throw UsageError(mech_path + ": " + e.what());
            }
            for (const auto& c : mech.decomposition.components) {
                if (c.rule.weights.size() != inst.dimension()) {
                    throw UsageError("mechanism does not match the instance dimension");
                }
            }
            const auto report = simulate(mech, inst, trials, globals.seed);
            json doc = to_json(report);
            if (report.mean_revenue) {
                put_rational(doc, "mean_revenue_raw", *report.mean_revenue * inst.scale());
                log.info("mean revenue " + std::to_string(to_double(*report.mean_revenue)) + " over " +
                         std::to_string(trials) + " trials");
            }
            emit(out, doc);
            return success;
        };
    });

    auto* brute = app.add_subcommand("brute-force", "enumeration-based ground truth");
    brute->require_subcommand(1);
    auto* membership = brute->add_subcommand("membership", "feasibility by the per-profile lottery LP");
    membership->add_option("instance", instance_path)->required();
    membership->add_option("reduced_form", rf_path)->required();
    membership->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            const auto result = membership_lp(read_reduced_form(rf_path, inst), inst, globals.max_enum);
            log.info(result.member ? "feasible" : "infeasible");
            json doc = {{"feasible", result.member}};
            if (result.member) {
                doc["implementation"] = lotteries(result.implementation);
            }
            emit(out, doc);
            return result.member ? success : negative;
        };
    });
    auto* brute_opt = brute->add_subcommand("optimize", "optimal revenue by the per-profile LP");
    bool brute_budgets = false;
    brute_opt->add_option("instance", instance_path)->required();
    brute_opt->add_flag("--budgets", brute_budgets, "enforce the instance's budgets");
    brute_opt->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            std::optional<RationalVector> budgets;
            if (brute_budgets) {
                budgets = instance_budgets(inst);
            }
            const auto best = optimal_per_profile_lp(inst, budgets, globals.max_enum);
            json prices = json::array();
            for (const auto& row : best.prices) {
                prices.push_back(rational_strings(row));
            }
            json doc = {{"reduced_form", nested(best.reduced_form.entries, inst)},
                        {"prices", std::move(prices)},
                        {"table", lotteries(best.table)}};
            put_rational(doc, "revenue", best.revenue);
            put_rational(doc, "revenue_raw", best.revenue * inst.scale());
            log.info("optimal revenue " + to_string(best.revenue));
            emit(out, doc);
            return success;
        };
    });

    auto* proxy = app.add_subcommand("proxy", "dump a sampled proxy distribution");
    SamplingFlags proxy_sampling;
    bool allow_small_k = false;
    proxy->add_option("instance", instance_path)->required();
    proxy_sampling.attach(proxy, true);
    proxy->add_flag("--allow-small-k", allow_small_k, "testing only: skip the k > k' * sum|T_i| check");
    proxy->callback([&] {
        action = [&](const Log& log) {
            const Instance inst = load_instance_file(instance_path);
            SamplingOptions options = proxy_sampling.options();
            options.allow_small_k = allow_small_k;
            const auto draw = build_proxy(inst, options, globals.seed);
            log.info(std::to_string(draw.profiles.size()) + " sampled profiles");
            emit(out, to_json(draw));
            return success;
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? success : usage;
    }

    const Log log(err, globals.verbose);
    try {
        return action(log);
    } catch (const UsageError& e) {
        return classify(e, err, usage);
    } catch (const ParseError& e) {
        return classify(e, err, usage);
    } catch (const InstanceError& e) {
        return classify(e, err, usage);
    } catch (const FeasibilityError& e) {
        return classify(e, err, usage);
    } catch (const SamplingError& e) {
        return classify(e, err, usage);
    } catch (const OptimizerError& e) {
        return classify(e, err, usage);
    } catch (const EnumerationError& e) {
        return classify(e, err, usage);
    } catch (const json::exception& e) {
        return classify(e, err, usage);
    } catch (const std::exception& e) {
        return classify(e, err, fault);
    }
}

}  // namespace revmech::cli
