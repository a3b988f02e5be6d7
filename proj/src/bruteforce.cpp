#include "revmech/bruteforce.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "revmech/ratlp.hpp"

namespace revmech {

namespace {

using SparseVector = std::vector<std::pair<std::size_t, Rational>>;

std::vector<Profile> support_profiles(const Instance& instance)
{
    std::vector<Profile> profiles;
    for (auto& wp : instance.profile_space()) {
        profiles.push_back(std::move(wp.profile));
    }
    return profiles;
}

// Reduced-form contribution of allocating S on support profile v: Pr[v] / Pr[t_i = v_i] per (i, j) in S.
SparseVector first_order_contribution(const Instance& instance, const WeightedProfile& wp, const Allocation& alloc)
{
    SparseVector out;
    for (const auto& a : alloc.assignments()) {
        const std::size_t type_index = wp.profile[a.bidder];
        out.emplace_back(instance.coordinate(a.bidder, type_index, a.item),
                         wp.probability / instance.type_probability(a.bidder, type_index));
    }
    return out;
}

// Contribution of allocating S on product profile u to every pi_ij(u_i, B).
SparseVector second_order_contribution(const Instance& instance, const Profile& profile, const Allocation& alloc)
{
    SparseVector out;
    for (const auto& a : alloc.assignments()) {
        for (std::size_t truth = 0; truth < instance.num_types(a.bidder); ++truth) {
            Rational conditional = instance.conditional_probability(a.bidder, truth, profile);
            if (conditional != 0) {
                out.emplace_back(instance.second_order_coordinate(a.bidder, profile[a.bidder], truth, a.item),
                                 std::move(conditional));
            }
        }
    }
    return out;
}

std::optional<std::size_t> checked_power(std::size_t base, std::size_t exponent, std::size_t cap)
{
    std::size_t result = 1;
    for (std::size_t k = 0; k < exponent; ++k) {
        if (base != 0 && result > cap / base) {
            return std::nullopt;
        }
        result *= base;
    }
    return result <= cap ? std::optional<std::size_t>(result) : std::nullopt;
}

template <class Contribution>
std::set<RationalVector> distinct_sums(std::size_t dimension, const std::vector<std::vector<Contribution>>& choices,
                                       std::size_t cap)
{
    std::set<RationalVector> partial{RationalVector(dimension, Rational(0))};
    for (const auto& options : choices) {
        if (partial.size() * options.size() > cap) {
            throw EnumerationError("distinct reduced-form enumeration exceeds the cap of " + std::to_string(cap));
        }
        std::set<RationalVector> next;
        for (const auto& base : partial) {
            for (const auto& contribution : options) {
                RationalVector sum = base;
                for (const auto& [k, value] : contribution) {
                    sum[k] += value;
                }
                next.insert(std::move(sum));
            }
        }
        partial = std::move(next);
    }
    return partial;
}

// One block of lottery variables per profile; returns the first variable index of each block.
std::vector<std::size_t> add_lottery_variables(LinearProgram& lp, std::size_t profiles, std::size_t family_size)
{
    std::vector<std::size_t> first(profiles);
    for (std::size_t v = 0; v < profiles; ++v) {
        first[v] = lp.num_variables();
        for (std::size_t s = 0; s < family_size; ++s) {
            lp.add_variable("x" + std::to_string(v) + "_" + std::to_string(s));
        }
        RationalVector row(lp.num_variables(), Rational(0));
        for (std::size_t s = 0; s < family_size; ++s) {
            row[first[v] + s] = 1;
        }
        lp.add_constraint(std::move(row), Relation::equal, Rational(1));
    }
    return first;
}

std::vector<ProfileDistribution> read_lotteries(const std::vector<Profile>& profiles,
                                                const std::vector<Allocation>& family,
                                                const std::vector<std::size_t>& first, const RationalVector& point)
{
    std::vector<ProfileDistribution> table;
    for (std::size_t v = 0; v < profiles.size(); ++v) {
        ProfileDistribution entry{profiles[v], {}};
        for (std::size_t s = 0; s < family.size(); ++s) {
            if (point[first[v] + s] > 0) {
                entry.lottery.emplace_back(family[s], point[first[v] + s]);
            }
        }
        table.push_back(std::move(entry));
    }
    return table;
}

// Coordinate k of the reduced form as a sparse linear form over lottery variables.
std::vector<SparseVector> first_order_forms(const Instance& instance, const std::vector<Allocation>& family,
                                            const std::vector<std::size_t>& first)
{
    std::vector<SparseVector> forms(instance.dimension());
    const auto space = instance.profile_space();
    for (std::size_t v = 0; v < space.size(); ++v) {
        for (std::size_t s = 0; s < family.size(); ++s) {
            for (auto& [k, value] : first_order_contribution(instance, space[v], family[s])) {
                forms[k].emplace_back(first[v] + s, std::move(value));
            }
        }
    }
    return forms;
}

RationalVector dense(const SparseVector& form, std::size_t size)
{
    RationalVector row(size, Rational(0));
    for (const auto& [k, value] : form) {
        row[k] += value;
    }
    return row;
}

Rational evaluate(const SparseVector& form, const RationalVector& point)
{
    Rational total = 0;
    for (const auto& [k, value] : form) {
        total += value * point[k];
    }
    return total;
}

}  // namespace

Allocation DeterministicRule::operator()(const Profile& profile) const
{
    auto it = std::lower_bound(profiles.begin(), profiles.end(), profile);
    if (it == profiles.end() || *it != profile) {
        throw std::out_of_range("deterministic rule is not defined on this profile");
    }
    return allocations[static_cast<std::size_t>(it - profiles.begin())];
}

std::optional<std::size_t> count_deterministic_rules(const Instance& instance, std::size_t cap)
{
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    return checked_power(family.size(), instance.support_size(), cap);
}

void for_each_deterministic_rule(const Instance& instance,
                                 const std::function<void(const DeterministicRule&, const ReducedForm&)>& visit,
                                 std::size_t cap)
{
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    const auto space = instance.profile_space();
    if (!checked_power(family.size(), space.size(), cap)) {
        throw EnumerationError("more than " + std::to_string(cap) + " deterministic rules");
    }
    std::vector<std::vector<SparseVector>> contribution(space.size());
    for (std::size_t v = 0; v < space.size(); ++v) {
        for (const auto& alloc : family) {
            contribution[v].push_back(first_order_contribution(instance, space[v], alloc));
        }
    }
    DeterministicRule rule;
    rule.profiles = support_profiles(instance);
    std::vector<std::size_t> choice(space.size(), 0);
    while (true) {
        rule.allocations.clear();
        ReducedForm pi(RationalVector(instance.dimension(), Rational(0)));
        for (std::size_t v = 0; v < space.size(); ++v) {
            rule.allocations.push_back(family[choice[v]]);
            for (const auto& [k, value] : contribution[v][choice[v]]) {
                pi[k] += value;
            }
        }
        visit(rule, pi);
        std::size_t pos = space.size();
        while (pos > 0) {
            --pos;
            if (++choice[pos] < family.size()) {
                break;
            }
            choice[pos] = 0;
            if (pos == 0) {
                return;
            }
        }
        if (space.empty()) {
            return;
        }
    }
}

std::vector<DeterministicRule> enumerate_deterministic_rules(const Instance& instance, std::size_t cap)
{
    std::vector<DeterministicRule> rules;
    for_each_deterministic_rule(
        instance, [&](const DeterministicRule& rule, const ReducedForm&) { rules.push_back(rule); }, cap);
    return rules;
}

std::vector<ReducedForm> distinct_reduced_forms(const Instance& instance, std::size_t cap)
{
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    std::vector<std::vector<SparseVector>> choices;
    for (const auto& wp : instance.profile_space()) {
        auto& options = choices.emplace_back();
        for (const auto& alloc : family) {
            options.push_back(first_order_contribution(instance, wp, alloc));
        }
    }
    std::vector<ReducedForm> out;
    for (const auto& v : distinct_sums(instance.dimension(), choices, cap)) {
        out.emplace_back(v);
    }
    return out;
}

HullMembership hull_membership(const RationalVector& point, const std::vector<RationalVector>& vertices)
{
    LinearProgram lp;
    for (std::size_t s = 0; s < vertices.size(); ++s) {
        lp.add_variable("l" + std::to_string(s));
    }
    lp.add_constraint(RationalVector(vertices.size(), Rational(1)), Relation::equal, Rational(1));
    for (std::size_t k = 0; k < point.size(); ++k) {
        RationalVector row(vertices.size());
        for (std::size_t s = 0; s < vertices.size(); ++s) {
            row[s] = vertices[s][k];
        }
        lp.add_constraint(std::move(row), Relation::equal, point[k]);
    }
    HullMembership result;
    for (const auto& v : vertices) {
        result.vertices.emplace_back(v);
    }
    LpSolution solution = solve(lp);
    if (solution.status == LpStatus::optimal) {
        result.member = true;
        result.weights = std::move(solution.point);
    }
    return result;
}

HullMembership hull_membership(const ReducedForm& pi, const Instance& instance, std::size_t cap)
{
    std::vector<RationalVector> vertices;
    for (auto& v : distinct_reduced_forms(instance, cap)) {
        vertices.push_back(std::move(v.entries));
    }
    return hull_membership(pi.entries, vertices);
}

MembershipResult membership_lp(const ReducedForm& pi, const Instance& instance, std::size_t cap)
{
    if (pi.size() != instance.dimension()) {
        throw std::invalid_argument("membership_lp: reduced form has the wrong dimension");
    }
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    const auto profiles = support_profiles(instance);
    if (family.size() * profiles.size() > cap) {
        throw EnumerationError("membership LP would need more than " + std::to_string(cap) + " variables");
    }
    LinearProgram lp;
    const auto first = add_lottery_variables(lp, profiles.size(), family.size());
    const auto forms = first_order_forms(instance, family, first);
    for (std::size_t k = 0; k < forms.size(); ++k) {
        lp.add_constraint(dense(forms[k], lp.num_variables()), Relation::equal, pi[k]);
    }
    MembershipResult result;
    LpSolution solution = solve(lp);
    if (solution.status == LpStatus::optimal) {
        result.member = true;
        result.implementation = read_lotteries(profiles, family, first, solution.point);
    }
    return result;
}

MembershipResult second_order_membership_lp(const SecondOrderReducedForm& pi, const Instance& instance,
                                            std::size_t cap)
{
    if (pi.size() != instance.second_order_dimension()) {
        throw std::invalid_argument("second_order_membership_lp: reduced form has the wrong dimension");
    }
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    const auto profiles = instance.product_profiles();
    if (family.size() * profiles.size() > cap) {
        throw EnumerationError("membership LP would need more than " + std::to_string(cap) + " variables");
    }
    LinearProgram lp;
    const auto first = add_lottery_variables(lp, profiles.size(), family.size());
    std::vector<SparseVector> forms(instance.second_order_dimension());
    for (std::size_t u = 0; u < profiles.size(); ++u) {
        for (std::size_t s = 0; s < family.size(); ++s) {
            for (auto& [k, value] : second_order_contribution(instance, profiles[u], family[s])) {
                forms[k].emplace_back(first[u] + s, std::move(value));
            }
        }
    }
    for (std::size_t k = 0; k < forms.size(); ++k) {
        lp.add_constraint(dense(forms[k], lp.num_variables()), Relation::equal, pi[k]);
    }
    MembershipResult result;
    LpSolution solution = solve(lp);
    if (solution.status == LpStatus::optimal) {
        result.member = true;
        result.implementation = read_lotteries(profiles, family, first, solution.point);
    }
    return result;
}

std::vector<SecondOrderReducedForm> enumerate_sorf_polytope(const Instance& instance, std::size_t cap)
{
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    std::vector<std::vector<SparseVector>> choices;
    for (const auto& profile : instance.product_profiles()) {
        auto& options = choices.emplace_back();
        for (const auto& alloc : family) {
            options.push_back(second_order_contribution(instance, profile, alloc));
        }
    }
    std::vector<SecondOrderReducedForm> out;
    for (const auto& v : distinct_sums(instance.second_order_dimension(), choices, cap)) {
        out.emplace_back(v);
    }
    return out;
}

PerProfileOptimum optimal_per_profile_lp(const Instance& instance, const std::optional<RationalVector>& budgets,
                                         std::size_t cap)
{
    if (!instance.is_independent()) {
        throw std::invalid_argument("optimal_per_profile_lp requires an independent instance");
    }
    const std::optional<RationalVector>& caps = budgets;
    if (caps && caps->size() != instance.bidders()) {
        throw std::invalid_argument("optimal_per_profile_lp: one budget per bidder expected");
    }
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    const auto profiles = support_profiles(instance);
    if (family.size() * profiles.size() > cap) {
        throw EnumerationError("per-profile LP would need more than " + std::to_string(cap) + " variables");
    }
    LinearProgram lp;
    const auto first = add_lottery_variables(lp, profiles.size(), family.size());
    const auto forms = first_order_forms(instance, family, first);
    const std::size_t m = instance.bidders();
    const std::size_t n = instance.items();
    std::vector<std::vector<std::size_t>> price(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            price[i].push_back(
                lp.add_variable("p" + std::to_string(i) + "_" + std::to_string(a), std::nullopt, std::nullopt));
        }
    }
    const std::size_t width = lp.num_variables();

    // Interim utility of true type `truth` reporting `report`, as a dense row.
    auto utility = [&](std::size_t i, std::size_t truth, std::size_t report) {
        RationalVector row(width, Rational(0));
        const auto& values = instance.type(i, truth).values;
        for (std::size_t j = 0; j < n; ++j) {
            for (const auto& [var, coef] : forms[instance.coordinate(i, report, j)]) {
                row[var] += values[j] * coef;
            }
        }
        row[price[i][report]] -= 1;
        return row;
    };
    RationalVector objective(width, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            const RationalVector truthful = utility(i, a, a);
            lp.add_constraint(truthful, Relation::greater_equal, Rational(0));
            for (std::size_t b = 0; b < instance.num_types(i); ++b) {
                if (b == a) {
                    continue;
                }
                RationalVector row = truthful;
                const RationalVector deviation = utility(i, a, b);
                for (std::size_t k = 0; k < width; ++k) {
                    row[k] -= deviation[k];
                }
                lp.add_constraint(std::move(row), Relation::greater_equal, Rational(0));
            }
            if (caps) {
                RationalVector row(width, Rational(0));
                row[price[i][a]] = 1;
                lp.add_constraint(std::move(row), Relation::less_equal, (*caps)[i]);
            }
            objective[price[i][a]] = instance.type_probability(i, a);
        }
    }
    lp.set_objective(Sense::maximize, std::move(objective));
    LpSolution solution = solve(lp);
    if (solution.status != LpStatus::optimal) {
        throw std::runtime_error("per-profile revenue LP ended " + to_string(solution.status));
    }
    PerProfileOptimum result;
    result.revenue = solution.value;
    result.reduced_form = ReducedForm(RationalVector(instance.dimension()));
    for (std::size_t k = 0; k < forms.size(); ++k) {
        result.reduced_form[k] = evaluate(forms[k], solution.point);
    }
    result.prices.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t var : price[i]) {
            result.prices[i].push_back(solution.point[var]);
        }
    }
    result.table = read_lotteries(profiles, family, first, solution.point);
    return result;
}

std::optional<Allocation> unique_argmax(const std::vector<Allocation>& family, const WeightMatrix& weights)
{
    std::optional<Allocation> best;
    Rational best_weight;
    bool tied = false;
    for (const auto& alloc : family) {
        Rational w = weights.weight_of(alloc);
        if (!best || w > best_weight) {
            best = alloc;
            best_weight = std::move(w);
            tied = false;
        } else if (w == best_weight) {
            tied = true;
        }
    }
    if (tied) {
        return std::nullopt;
    }
    return best;
}

bool is_simple(const VirtualVcgRule& rule, const Instance& instance)
{
    const auto family = expand_family(instance.feasibility(), instance.bidders(), instance.items());
    const WeightVector f = virtual_weights(rule.weights, instance);
    for (const auto& profile : instance.product_profiles()) {
        const WeightMatrix matrix = virtual_weight_matrix(f, instance, profile);
        const auto unique = unique_argmax(family, matrix);
        if (!unique || *unique != max_weight_allocation(instance.feasibility(), matrix)) {
            return false;
        }
    }
    return true;
}

}  // namespace revmech
