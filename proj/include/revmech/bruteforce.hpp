#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "revmech/model.hpp"
#include "revmech/vvcg.hpp"

namespace revmech {

/// Raised when an exhaustive enumeration would exceed its cap.
class EnumerationError : public std::runtime_error
{
public:
    explicit EnumerationError(const std::string& what) : std::runtime_error(what) {}
};

constexpr std::size_t default_enumeration_cap = 1'000'000;

/// One allocation per profile, in the order of `profiles`.
struct DeterministicRule
{
    std::vector<Profile> profiles;
    std::vector<Allocation> allocations;

    Allocation operator()(const Profile& profile) const;
};

/// |F|^|support|, or nullopt when it exceeds `cap`.
std::optional<std::size_t> count_deterministic_rules(const Instance& instance, std::size_t cap = default_enumeration_cap);

/// Visits every deterministic rule over the support in odometer order (last
/// profile fastest) together with its reduced form. Throws EnumerationError
/// past the cap.
void for_each_deterministic_rule(const Instance& instance,
                                 const std::function<void(const DeterministicRule&, const ReducedForm&)>& visit,
                                 std::size_t cap = default_enumeration_cap);

std::vector<DeterministicRule> enumerate_deterministic_rules(const Instance& instance,
                                                             std::size_t cap = default_enumeration_cap);

/// Distinct reduced forms of all deterministic rules, sorted. Built profile by
/// profile, so the cap bounds |F| * |support| * (distinct partial sums).
std::vector<ReducedForm> distinct_reduced_forms(const Instance& instance, std::size_t cap = default_enumeration_cap);

struct HullMembership
{
    bool member = false;
    std::vector<ReducedForm> vertices;
    RationalVector weights;  // convex weights over `vertices` when member
};

/// Exact LP: is pi a convex combination of the given points?
HullMembership hull_membership(const RationalVector& point, const std::vector<RationalVector>& vertices);
/// Convex hull of distinct_reduced_forms.
HullMembership hull_membership(const ReducedForm& pi, const Instance& instance,
                               std::size_t cap = default_enumeration_cap);

struct ProfileDistribution
{
    Profile profile;
    std::vector<std::pair<Allocation, Rational>> lottery;  // positive entries only
};

struct MembershipResult
{
    bool member = false;
    std::vector<ProfileDistribution> implementation;  // when member
};

/// Exact LP over one lottery per support profile: x_{v,S} >= 0, sum_S x_{v,S} = 1,
/// sum_{v : v_i = A} Pr[v] / Pr[t_i = A] * sum_{S containing (i,j)} x_{v,S} = pi_ij(A).
MembershipResult membership_lp(const ReducedForm& pi, const Instance& instance,
                               std::size_t cap = default_enumeration_cap);

/// The same over the product of type spaces for second-order reduced forms.
MembershipResult second_order_membership_lp(const SecondOrderReducedForm& pi, const Instance& instance,
                                            std::size_t cap = default_enumeration_cap);

/// Distinct second-order reduced forms of all deterministic rules over the
/// product of type spaces, sorted.
std::vector<SecondOrderReducedForm> enumerate_sorf_polytope(const Instance& instance,
                                                            std::size_t cap = default_enumeration_cap);

struct PerProfileOptimum
{
    Rational revenue;
    ReducedForm reduced_form;
    std::vector<RationalVector> prices;  // prices[i][A]
    std::vector<ProfileDistribution> table;
};

/// Revenue-optimal BIC, interim-IR mechanism via one lottery per profile.
/// Budget rows p_i(A) <= B_i only when `budgets` is given. Independent instances only.
PerProfileOptimum optimal_per_profile_lp(const Instance& instance,
                                         const std::optional<RationalVector>& budgets = std::nullopt,
                                         std::size_t cap = default_enumeration_cap);

/// The unique max-weight member of the expanded family, or nullopt on a tie.
std::optional<Allocation> unique_argmax(const std::vector<Allocation>& family, const WeightMatrix& weights);

/// True iff, on every profile of the type product, the rule's virtual weight
/// matrix has a unique maximizer and run_vvcg returns it.
bool is_simple(const VirtualVcgRule& rule, const Instance& instance);

}  // namespace revmech
