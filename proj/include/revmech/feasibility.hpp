#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "revmech/rational.hpp"

namespace revmech {

/// One (bidder, item) pair; both indices are 0-based.
struct Assignment
{
    std::size_t bidder = 0;
    std::size_t item = 0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// A deterministic allocation: a set of assignments kept sorted and duplicate-free.
class Allocation
{
public:
    Allocation() = default;
    explicit Allocation(std::vector<Assignment> assignments);

    const std::vector<Assignment>& assignments() const { return assignments_; }
    bool empty() const { return assignments_.empty(); }
    std::size_t size() const { return assignments_.size(); }
    bool contains(std::size_t bidder, std::size_t item) const;

    friend bool operator==(const Allocation&, const Allocation&) = default;
    friend auto operator<=>(const Allocation&, const Allocation&) = default;

private:
    std::vector<Assignment> assignments_;
};

std::string to_string(const Allocation& allocation);

/// Dense m x n matrix of rational weights; entries may be negative.
class WeightMatrix
{
public:
    WeightMatrix() = default;
    WeightMatrix(std::size_t bidders, std::size_t items);
    WeightMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    std::size_t bidders() const { return bidders_; }
    std::size_t items() const { return items_; }

    Rational& operator()(std::size_t bidder, std::size_t item) { return data_[bidder * items_ + item]; }
    const Rational& operator()(std::size_t bidder, std::size_t item) const
    {
        return data_[bidder * items_ + item];
    }

    Rational weight_of(const Allocation& allocation) const;

private:
    std::size_t bidders_ = 0;
    std::size_t items_ = 0;
    RationalVector data_;
};

enum class FeasibilityKind
{
    explicit_family,
    single_item,
    per_item_supply,
    unit_demand_matching,
    public_project,
};

class FeasibilityError : public std::runtime_error
{
public:
    explicit FeasibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// The feasibility system F over the assignment space [m] x [n].
///
/// Built-in kinds:
///  - single_item: one item; at most one winner (the empty allocation is a
///    member unless allow_empty is false).
///  - per_item_supply: each item goes to at most one bidder.
///  - unit_demand_matching: each item to at most one bidder and each bidder
///    gets at most one item.
///  - public_project: each item is awarded to every bidder or to nobody.
///  - explicit_family: an arbitrary list of allocations; need not be
///    downward-closed and need not contain the empty allocation.
struct FeasibilitySpec
{
    FeasibilityKind kind = FeasibilityKind::per_item_supply;
    std::vector<Allocation> allocations;  // explicit_family only
    bool allow_empty = true;               // single_item only

    static FeasibilitySpec explicit_family(std::vector<Allocation> allocations);
    static FeasibilitySpec single_item(bool allow_empty = true);
    static FeasibilitySpec per_item_supply();
    static FeasibilitySpec unit_demand_matching();
    static FeasibilitySpec public_project();

    /// Throws FeasibilityError when the constraints are inconsistent with an m x n instance.
    void validate(std::size_t bidders, std::size_t items) const;

    friend bool operator==(const FeasibilitySpec&, const FeasibilitySpec&) = default;
};

std::string kind_name(FeasibilityKind kind);

/// Max-weight member of F. Ties: explicit families return the first maximal
/// member in list order; built-in kinds prefer leaving a zero-gain item (or
/// edge) unassigned and otherwise the lowest bidder index.
Allocation max_weight_allocation(const FeasibilitySpec& spec, const WeightMatrix& weights);

/// True iff the allocation is a member of F for an m x n instance.
bool validate_allocation(const FeasibilitySpec& spec, const Allocation& allocation, std::size_t bidders,
                         std::size_t items);

/// All members of F for an m x n instance, in a fixed order. Built-in kinds
/// are expanded by enumerating subsets of [m] x [n] (requires m*n <= 20).
std::vector<Allocation> expand_family(const FeasibilitySpec& spec, std::size_t bidders, std::size_t items);

using MaxWeightSolver = std::function<Allocation(const WeightMatrix&)>;

/// Wraps a solver that only accepts non-negative weights: negative entries are
/// zeroed before the call and assignments with negative original weight are
/// dropped afterwards. Only sound for downward-closed families.
MaxWeightSolver negative_weight_adapter(MaxWeightSolver nonnegative_solver);

/// Exact maximum-weight assignment (Kuhn-Munkres) for non-negative weights.
/// Zero-weight edges may appear in the result.
Allocation max_weight_matching_nonnegative(const WeightMatrix& weights);

nlohmann::json to_json(const FeasibilitySpec& spec);
FeasibilitySpec feasibility_from_json(const nlohmann::json& document);

}  // namespace revmech
