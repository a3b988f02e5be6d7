#include "revmech/geometry.hpp"

#include <ostream>

namespace revmech {

PolytopeOracle reduced_form_polytope(const Instance& instance)
{
    PolytopeOracle polytope;
    polytope.dimension = instance.dimension();
    polytope.maximize = [&instance](const RationalVector& w) {
        VirtualVcgRule rule = simple_rule(WeightVector(w), instance);
        PolytopeOracle::Vertex v;
        v.point = reduced_form_of(rule, instance).entries;
        v.rule_weights = std::move(rule.weights.entries);
        return v;
    };
    return polytope;
}

PolytopeOracle second_order_polytope(const Instance& instance)
{
    PolytopeOracle polytope;
    polytope.dimension = instance.second_order_dimension();
    polytope.maximize = [&instance](const RationalVector& w) {
        SecondOrderVcgRule rule{SecondOrderWeights(w), true};
        PolytopeOracle::Vertex v;
        v.point = second_order_reduced_form(as_allocation_rule(rule, instance), instance).entries;
        v.rule_weights = w;
        return v;
    };
    return polytope;
}

Hyperplane FeasibilityVerdict::witness_hyperplane() const
{
    if (!witness) {
        throw std::logic_error("feasible verdict carries no witness");
    }
    return {witness->weights, witness->value};
}

std::optional<Hyperplane> inner_oracle(const PolytopeOracle& polytope, const RationalVector& w, const Rational& t)
{
    PolytopeOracle::Vertex v = polytope.maximize(w);
    if (dot(v.point, w) <= t) {
        return std::nullopt;
    }
    Hyperplane cut{std::move(v.point), Rational(0)};
    cut.normal.push_back(Rational(-1));
    return cut;
}

std::optional<Hyperplane> inner_oracle(const WeightVector& w, const Rational& t, const Instance& instance)
{
    return inner_oracle(reduced_form_polytope(instance), w.entries, t);
}

FeasibilityVerdict separation_oracle(const PolytopeOracle& polytope, const RationalVector& point,
                                     const GeometryOptions& options)
{
    const std::size_t d = polytope.dimension;
    if (point.size() != d) {
        throw std::invalid_argument("separation_oracle: point has dimension " + std::to_string(point.size()) +
                                    ", expected " + std::to_string(d));
    }
    LinearProgram lp;
    for (std::size_t k = 0; k < d; ++k) {
        lp.add_variable("w" + std::to_string(k), Rational(-1), Rational(1));
    }
    // Every vertex lies in [0,1]^d, so W(w) >= -d on the box.
    const std::size_t t_index = lp.add_variable("t", Rational(-static_cast<long>(d)), std::nullopt);
    RationalVector objective(d + 1);
    for (std::size_t k = 0; k < d; ++k) {
        objective[k] = -point[k];
    }
    objective[t_index] = 1;
    lp.set_objective(Sense::minimize, std::move(objective));

    auto oracle = [&](std::span<const Rational> x) {
        return inner_oracle(polytope, RationalVector(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d)),
                            x[t_index]);
    };
    OracleOptions lp_options;
    lp_options.max_iterations = options.max_iterations;
    lp_options.trace = options.trace;
    OracleSolution result = solve_with_oracle(lp, oracle, lp_options);
    if (result.solution.status != LpStatus::optimal) {
        throw GeometryFault("separation LP ended " + to_string(result.solution.status));
    }
    FeasibilityVerdict verdict;
    if (result.solution.value >= 0) {
        verdict.feasible = true;
        return verdict;
    }
    const RationalVector& x = result.solution.point;
    verdict.witness = Witness{RationalVector(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d)), x[t_index]};
    if (options.trace) {
        *options.trace << "infeasible: t* = " << to_string(x[t_index]) << ", gap " << to_string(result.solution.value)
                       << " after " << result.iterations << " cuts\n";
    }
    return verdict;
}

FeasibilityVerdict separation_oracle(const ReducedForm& pi, const Instance& instance, const GeometryOptions& options)
{
    return separation_oracle(reduced_form_polytope(instance), pi.entries, options);
}

FeasibilityVerdict second_order_feasibility(const SecondOrderReducedForm& pi, const Instance& instance,
                                            const GeometryOptions& options)
{
    return separation_oracle(second_order_polytope(instance), pi.entries, options);
}

Corner corner_oracle(const PolytopeOracle& polytope, const std::vector<Hyperplane>& tight)
{
    RationalVector w(polytope.dimension, Rational(0));
    for (const auto& h : tight) {
        if (h.normal.size() != polytope.dimension) {
            throw std::invalid_argument("corner_oracle: hyperplane has the wrong dimension");
        }
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k] += h.normal[k];
        }
    }
    if (!tight.empty()) {
        const Rational count(static_cast<long>(tight.size()));
        for (auto& entry : w) {
            entry /= count;
        }
    }
    PolytopeOracle::Vertex v = polytope.maximize(w);
    for (std::size_t h = 0; h < tight.size(); ++h) {
        if (dot(v.point, tight[h].normal) != tight[h].offset) {
            throw GeometryFault("corner misses tight hyperplane " + std::to_string(h));
        }
    }
    return {std::move(v.point), std::move(v.rule_weights)};
}

ReducedFormCorner corner_oracle(const std::vector<Hyperplane>& tight, const Instance& instance)
{
    Corner c = corner_oracle(reduced_form_polytope(instance), tight);
    return {ReducedForm(std::move(c.point)), WeightVector(std::move(c.rule_weights))};
}

namespace {

struct Candidate
{
    Rational coefficient;  // coefficient * lambda <= rhs
    Rational rhs;
    Hyperplane face;  // the same bound over z
};

}  // namespace

std::vector<WeightedVertex> decompose(const PolytopeOracle& polytope, const RationalVector& point,
                                      const GeometryOptions& options)
{
    const std::size_t d = polytope.dimension;
    if (point.size() != d) {
        throw std::invalid_argument("decompose: point has the wrong dimension");
    }
    RationalVector x = point;
    Rational residual = 1;
    std::vector<Hyperplane> tight;
    std::vector<WeightedVertex> out;

    for (std::size_t round = 0; round <= d; ++round) {
        Corner c = corner_oracle(polytope, tight);
        if (c.point == x) {
            out.push_back({residual, std::move(c)});
            return out;
        }
        RationalVector dir(d);
        for (std::size_t k = 0; k < d; ++k) {
            dir[k] = x[k] - c.point[k];
        }

        LinearProgram lp;
        lp.add_variable("lambda", Rational(1), std::nullopt);
        lp.set_objective(Sense::maximize, {Rational(1)});
        std::vector<Candidate> candidates;
        for (std::size_t k = 0; k < d; ++k) {
            if (dir[k] == 0) {
                continue;
            }
            RationalVector normal(d, Rational(0));
            if (dir[k] > 0) {
                normal[k] = 1;
                candidates.push_back({dir[k], 1 - c.point[k], {std::move(normal), Rational(1)}});
            } else {
                normal[k] = -1;
                candidates.push_back({-dir[k], c.point[k], {std::move(normal), Rational(0)}});
            }
            lp.add_constraint({candidates.back().coefficient}, Relation::less_equal, candidates.back().rhs);
        }
        for (const auto& h : tight) {
            lp.add_constraint({dot(dir, h.normal)}, Relation::equal, h.offset - dot(c.point, h.normal));
        }

        std::vector<Hyperplane> witnesses;
        auto oracle = [&](std::span<const Rational> lambda) -> std::optional<Hyperplane> {
            RationalVector z(d);
            for (std::size_t k = 0; k < d; ++k) {
                z[k] = c.point[k] + lambda[0] * dir[k];
            }
            FeasibilityVerdict verdict = separation_oracle(polytope, z, options);
            if (verdict.feasible) {
                return std::nullopt;
            }
            Hyperplane face = verdict.witness_hyperplane();
            Hyperplane cut{{dot(dir, face.normal)}, face.offset - dot(c.point, face.normal)};
            witnesses.push_back(std::move(face));
            return cut;
        };
        OracleOptions lp_options;
        lp_options.max_iterations = options.max_iterations;
        OracleSolution result = solve_with_oracle(lp, oracle, lp_options);
        if (result.solution.status == LpStatus::infeasible) {
            throw GeometryFault("decompose: point is not in the polytope");
        }
        if (result.solution.status != LpStatus::optimal) {
            throw GeometryFault("decompose: ray LP ended " + to_string(result.solution.status));
        }
        for (std::size_t k = 0; k < result.cuts.size(); ++k) {
            candidates.push_back({result.cuts[k].normal[0], result.cuts[k].offset, std::move(witnesses[k])});
        }
        const Rational lambda = result.solution.point[0];
        const Candidate* binding = nullptr;
        for (const auto& candidate : candidates) {
            if (candidate.coefficient * lambda == candidate.rhs) {
                binding = &candidate;
                break;
            }
        }
        if (!binding) {
            throw GeometryFault("decompose: no binding constraint at lambda = " + to_string(lambda));
        }
        if (options.trace) {
            *options.trace << "round " << round << ": lambda* = " << to_string(lambda) << '\n';
        }
        tight.push_back(binding->face);
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = c.point[k] + lambda * dir[k];
        }
        const Rational weight = residual * (1 - 1 / lambda);
        if (weight > 0) {
            out.push_back({weight, std::move(c)});
        }
        residual /= lambda;
    }
    throw GeometryFault("decompose: no corner reached after dimension + 1 rounds");
}

Decomposition decompose(const ReducedForm& pi, const Instance& instance, const GeometryOptions& options)
{
    Decomposition result;
    for (auto& v : decompose(reduced_form_polytope(instance), pi.entries, options)) {
        result.components.push_back(
            {std::move(v.probability), VirtualVcgRule{WeightVector(std::move(v.corner.rule_weights)), true}});
    }
    return result;
}

ReducedForm reduced_form_of(const Decomposition& decomposition, const Instance& instance)
{
    ReducedForm total(RationalVector(instance.dimension(), Rational(0)));
    for (const auto& component : decomposition.components) {
        const ReducedForm pi = reduced_form_of(component.rule, instance);
        for (std::size_t k = 0; k < total.size(); ++k) {
            if (!pi[k].is_zero()) {
                total[k] += component.probability * pi[k];
            }
        }
    }
    return total;
}

SecondOrderDecomposition second_order_decompose(const SecondOrderReducedForm& pi, const Instance& instance,
                                                const GeometryOptions& options)
{
    SecondOrderDecomposition result;
    for (auto& v : decompose(second_order_polytope(instance), pi.entries, options)) {
        result.components.push_back(
            {std::move(v.probability), SecondOrderVcgRule{SecondOrderWeights(std::move(v.corner.rule_weights)), true}});
    }
    return result;
}

SecondOrderReducedForm second_order_reduced_form_of(const SecondOrderDecomposition& decomposition,
                                                    const Instance& instance)
{
    SecondOrderReducedForm total(RationalVector(instance.second_order_dimension(), Rational(0)));
    for (const auto& component : decomposition.components) {
        const SecondOrderReducedForm pi =
            second_order_reduced_form(as_allocation_rule(component.rule, instance), instance);
        for (std::size_t k = 0; k < total.size(); ++k) {
            if (!pi[k].is_zero()) {
                total[k] += component.probability * pi[k];
            }
        }
    }
    return total;
}

nlohmann::json to_json(const FeasibilityVerdict& verdict)
{
    nlohmann::json out = {{"feasible", verdict.feasible}};
    if (verdict.witness) {
        nlohmann::json witness = {{"w", rational_strings(verdict.witness->weights)}};
        put_rational(witness, "t", verdict.witness->value);
        out["witness"] = std::move(witness);
    }
    return out;
}

nlohmann::json to_json(const Decomposition& decomposition)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& component : decomposition.components) {
        nlohmann::json entry = to_json(component.rule);
        put_rational(entry, "prob", component.probability);
        out.push_back(std::move(entry));
    }
    return out;
}

Decomposition decomposition_from_json(const nlohmann::json& document)
{
    Decomposition result;
    for (const auto& entry : document) {
        result.components.push_back({rational_from_json(entry.at("prob")), virtual_vcg_rule_from_json(entry)});
    }
    return result;
}

}  // namespace revmech
