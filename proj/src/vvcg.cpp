#include "revmech/vvcg.hpp"

#include <algorithm>

namespace revmech {

namespace {

std::size_t profile_rank(const Profile& profile, const Instance& instance)
{
    std::size_t rank = 0;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        rank = rank * instance.num_types(i) + profile[i];
    }
    return rank;
}

}  // namespace

WeightVector virtual_weights(const WeightVector& weights, const Instance& instance)
{
    if (weights.size() != instance.dimension()) {
        throw std::invalid_argument("virtual_weights: weight vector has the wrong dimension");
    }
    WeightVector f = weights;
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            const Rational& p = instance.type_probability(i, a);
            for (std::size_t j = 0; j < instance.items(); ++j) {
                f[instance.coordinate(i, a, j)] /= p;
            }
        }
    }
    return f;
}

WeightVector tie_break(const WeightVector& weights, const Instance& instance)
{
    const WeightVector f = virtual_weights(weights, instance);

    std::size_t weight_bits = 1;
    for (const auto& w : weights.entries) {
        weight_bits = std::max(weight_bits, bit_length(w));
    }
    std::size_t probability_bits = 1;
    for (const auto& row : instance.marginals()) {
        for (const auto& p : row) {
            probability_bits = std::max(probability_bits, bit_length(p));
        }
    }
    const std::size_t n = instance.items();
    const std::size_t b = n * instance.total_types() * (weight_bits + probability_bits);

    Integer common = 1;
    for (const auto& value : f.entries) {
        common *= denominator(value);
    }

    WeightVector result(RationalVector(weights.size()));
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t k = instance.coordinate(i, a, j);
                // 1-based bidder and item indices in the exponent.
                const std::size_t exponent = b + n * (i + 1) + (j + 1) + 1;
                Rational shifted = f[k] + inverse_power_of_two(exponent) / Rational(common);
                result[k] = shifted * instance.type_probability(i, a);
            }
        }
    }
    return result;
}

VirtualVcgRule simple_rule(const WeightVector& weights, const Instance& instance)
{
    return {tie_break(weights, instance), true};
}

WeightMatrix virtual_weight_matrix(const WeightVector& virtual_values, const Instance& instance,
                                   const Profile& profile)
{
    WeightMatrix matrix(instance.bidders(), instance.items());
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t j = 0; j < instance.items(); ++j) {
            matrix(i, j) = virtual_values[instance.coordinate(i, profile[i], j)];
        }
    }
    return matrix;
}

Allocation run_vvcg(const VirtualVcgRule& rule, const Instance& instance, const Profile& profile)
{
    const WeightVector f = virtual_weights(rule.weights, instance);
    return max_weight_allocation(instance.feasibility(), virtual_weight_matrix(f, instance, profile));
}

AllocationRule rule_from_virtual_weights(WeightVector virtual_values, const Instance& instance)
{
    return [f = std::move(virtual_values), &instance](const Profile& profile) {
        return max_weight_allocation(instance.feasibility(), virtual_weight_matrix(f, instance, profile));
    };
}

AllocationRule as_allocation_rule(const VirtualVcgRule& rule, const Instance& instance)
{
    return rule_from_virtual_weights(virtual_weights(rule.weights, instance), instance);
}

ReducedForm reduced_form_of(const AllocationRule& rule, const Instance& instance)
{
    ReducedForm pi(RationalVector(instance.dimension(), Rational(0)));
    for (const auto& [profile, probability] : instance.profile_space()) {
        const Allocation alloc = rule(profile);
        for (const auto& a : alloc.assignments()) {
            const std::size_t type_index = profile[a.bidder];
            pi[instance.coordinate(a.bidder, type_index, a.item)] +=
                probability / instance.type_probability(a.bidder, type_index);
        }
    }
    return pi;
}

ReducedForm reduced_form_of(const VirtualVcgRule& rule, const Instance& instance)
{
    return reduced_form_of(as_allocation_rule(rule, instance), instance);
}

WelfareValue w_value(const WeightVector& weights, const Instance& instance)
{
    VirtualVcgRule rule = simple_rule(weights, instance);
    ReducedForm pi = reduced_form_of(rule, instance);
    Rational value = dot(pi.entries, weights.entries);
    return {std::move(pi), std::move(value), std::move(rule)};
}

WeightMatrix second_order_weights(const SecondOrderWeights& weights, const Instance& instance,
                                  const Profile& profile)
{
    if (weights.size() != instance.second_order_dimension()) {
        throw std::invalid_argument("second_order_weights: weight vector has the wrong dimension");
    }
    WeightMatrix matrix(instance.bidders(), instance.items());
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t truth = 0; truth < instance.num_types(i); ++truth) {
            const Rational conditional = instance.conditional_probability(i, truth, profile);
            if (conditional == 0) {
                continue;
            }
            for (std::size_t j = 0; j < instance.items(); ++j) {
                const Rational& w = weights[instance.second_order_coordinate(i, profile[i], truth, j)];
                if (w != 0) {
                    matrix(i, j) += w * conditional;
                }
            }
        }
    }
    return matrix;
}

WeightMatrix perturb_weight_matrix(const WeightMatrix& weights)
{
    const std::size_t m = weights.bidders();
    const std::size_t n = weights.items();
    std::size_t entry_bits = 1;
    Integer common = 1;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            entry_bits = std::max(entry_bits, bit_length(weights(i, j)));
            common *= denominator(weights(i, j));
        }
    }
    const std::size_t b = m * n * entry_bits;
    WeightMatrix result = weights;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            result(i, j) += inverse_power_of_two(b + n * (i + 1) + (j + 1) + 1) / Rational(common);
        }
    }
    return result;
}

Allocation run_sovcg(const SecondOrderVcgRule& rule, const Instance& instance, const Profile& profile)
{
    WeightMatrix matrix = second_order_weights(rule.weights, instance, profile);
    if (rule.perturbed) {
        matrix = perturb_weight_matrix(matrix);
    }
    return max_weight_allocation(instance.feasibility(), matrix);
}

AllocationRule as_allocation_rule(const SecondOrderVcgRule& rule, const Instance& instance)
{
    return [rule, &instance](const Profile& profile) { return run_sovcg(rule, instance, profile); };
}

SecondOrderReducedForm second_order_reduced_form(const AllocationRule& rule, const Instance& instance)
{
    // Evaluate the rule once per product profile; misreports reach profiles outside the support.
    std::vector<Allocation> table;
    table.reserve(instance.product_size());
    for (const auto& profile : instance.product_profiles()) {
        table.push_back(rule(profile));
    }
    SecondOrderReducedForm pi(RationalVector(instance.second_order_dimension(), Rational(0)));
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t truth = 0; truth < instance.num_types(i); ++truth) {
            for (const auto& [others, probability] : instance.conditional_others(i, truth)) {
                Profile reported = others;
                for (std::size_t a = 0; a < instance.num_types(i); ++a) {
                    reported[i] = a;
                    const Allocation& alloc = table[profile_rank(reported, instance)];
                    for (const auto& asg : alloc.assignments()) {
                        if (asg.bidder == i) {
                            pi[instance.second_order_coordinate(i, a, truth, asg.item)] += probability;
                        }
                    }
                }
            }
        }
    }
    return pi;
}

WeightVector sovcg_collapse(const SecondOrderWeights& weights, const Instance& instance)
{
    if (!instance.is_independent()) {
        throw std::invalid_argument("sovcg_collapse requires an independent instance");
    }
    if (weights.size() != instance.second_order_dimension()) {
        throw std::invalid_argument("sovcg_collapse: weight vector has the wrong dimension");
    }
    WeightVector collapsed(RationalVector(instance.dimension(), Rational(0)));
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            for (std::size_t b = 0; b < instance.num_types(i); ++b) {
                for (std::size_t j = 0; j < instance.items(); ++j) {
                    collapsed[instance.coordinate(i, a, j)] += weights[instance.second_order_coordinate(i, a, b, j)];
                }
            }
        }
    }
    return collapsed;
}

SecondOrderWelfareValue second_order_w_value(const SecondOrderWeights& weights, const Instance& instance)
{
    SecondOrderVcgRule rule{weights, true};
    SecondOrderReducedForm pi = second_order_reduced_form(as_allocation_rule(rule, instance), instance);
    Rational value = dot(pi.entries, weights.entries);
    return {std::move(pi), std::move(value), std::move(rule)};
}

nlohmann::json to_json(const VirtualVcgRule& rule)
{
    return {{"weights", rational_strings(rule.weights.entries)}, {"perturbed", rule.perturbed}};
}

VirtualVcgRule virtual_vcg_rule_from_json(const nlohmann::json& document)
{
    VirtualVcgRule rule;
    rule.weights = WeightVector(rational_array_from_json(document.at("weights")));
    rule.perturbed = document.value("perturbed", false);
    return rule;
}

}  // namespace revmech
