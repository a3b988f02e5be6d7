#pragma once

#include <functional>

#include "revmech/feasibility.hpp"
#include "revmech/model.hpp"

namespace revmech {

/// A virtual VCG allocation rule: on profile v, run VCG_F with weights
/// f_ij(v_i) = w_ij(v_i) / Pr[t_i = v_i].
struct VirtualVcgRule
{
    WeightVector weights;
    bool perturbed = false;  // true once tie_break has been applied

    friend bool operator==(const VirtualVcgRule&, const VirtualVcgRule&) = default;
};

/// A second-order VCG rule with weights w_ij(A, B). When `perturbed` is set the
/// per-profile weight matrix receives the same assignment-indexed 2^-k
/// perturbation that tie_break uses, which makes the argmax unique on every profile.
struct SecondOrderVcgRule
{
    SecondOrderWeights weights;
    bool perturbed = false;

    friend bool operator==(const SecondOrderVcgRule&, const SecondOrderVcgRule&) = default;
};

using AllocationRule = std::function<Allocation(const Profile&)>;

/// f_ij(A) = w_ij(A) / Pr[t_i = A]
WeightVector virtual_weights(const WeightVector& weights, const Instance& instance);

/// Lexicographic tie-breaking: write every f_ij(A) over the common denominator
/// Q (product of the denominators), add 2^-(b + n*i + j + 1) to the numerator
/// of f_ij(A) (i and j 1-based, b = n * sum|T_i| * (l1 + l2)) and scale back by
/// Pr[t_i = A]. The result selects, on every profile, the unique max-weight
/// allocation under the perturbed weights, and that allocation is also
/// max-weight under the original ones.
WeightVector tie_break(const WeightVector& weights, const Instance& instance);

/// {tie_break(w), perturbed = true}
VirtualVcgRule simple_rule(const WeightVector& weights, const Instance& instance);

/// The m x n matrix of virtual weights a rule uses on `profile`.
WeightMatrix virtual_weight_matrix(const WeightVector& virtual_values, const Instance& instance,
                                   const Profile& profile);

Allocation run_vvcg(const VirtualVcgRule& rule, const Instance& instance, const Profile& profile);

/// Allocation rule closure with the virtual weights precomputed.
AllocationRule as_allocation_rule(const VirtualVcgRule& rule, const Instance& instance);

/// Rule defined directly by virtual weights f (no division by probabilities).
AllocationRule rule_from_virtual_weights(WeightVector virtual_values, const Instance& instance);

/// pi_ij(A) = sum over support profiles with t_i = A of Pr[v | t_i = A] * 1[(i,j) in rule(v)].
ReducedForm reduced_form_of(const AllocationRule& rule, const Instance& instance);
ReducedForm reduced_form_of(const VirtualVcgRule& rule, const Instance& instance);

struct WelfareValue
{
    ReducedForm reduced_form;  // R_F(w)
    Rational value;            // W_F(w) = R_F(w) . w
    VirtualVcgRule rule;       // the tie-broken rule realizing it
};

WelfareValue w_value(const WeightVector& weights, const Instance& instance);

/// f_ij(v) = sum_B w_ij(v_i, B) * Pr[v_{-i} <- D_{-i}(B)]
WeightMatrix second_order_weights(const SecondOrderWeights& weights, const Instance& instance,
                                  const Profile& profile);

/// Adds the lexicographic 2^-k perturbation to one weight matrix over its own
/// common denominator. The argmax under the result is unique and is an argmax
/// of the input.
WeightMatrix perturb_weight_matrix(const WeightMatrix& weights);

Allocation run_sovcg(const SecondOrderVcgRule& rule, const Instance& instance, const Profile& profile);
AllocationRule as_allocation_rule(const SecondOrderVcgRule& rule, const Instance& instance);

/// pi_ij(A, B) = sum_{v_-i} Pr[v_-i <- D_-i(B)] * 1[(i,j) in rule(A, v_-i)].
/// The rule must be defined on the full product of type spaces.
SecondOrderReducedForm second_order_reduced_form(const AllocationRule& rule, const Instance& instance);

/// w'_ij(A) = sum_B w_ij(A, B). Independent instances only.
WeightVector sovcg_collapse(const SecondOrderWeights& weights, const Instance& instance);

struct SecondOrderWelfareValue
{
    SecondOrderReducedForm reduced_form;
    Rational value;
    SecondOrderVcgRule rule;
};

SecondOrderWelfareValue second_order_w_value(const SecondOrderWeights& weights, const Instance& instance);

nlohmann::json to_json(const VirtualVcgRule& rule);
VirtualVcgRule virtual_vcg_rule_from_json(const nlohmann::json& document);

}  // namespace revmech
