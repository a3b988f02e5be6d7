#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "revmech/rational.hpp"

namespace revmech {

enum class Sense
{
    maximize,
    minimize,
};

enum class Relation
{
    less_equal,
    greater_equal,
    equal,
};

/// normal . x <= offset
struct Hyperplane
{
    RationalVector normal;
    Rational offset;

    friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
    friend bool operator<(const Hyperplane& a, const Hyperplane& b)
    {
        if (a.normal != b.normal) {
            return std::lexicographical_compare(a.normal.begin(), a.normal.end(), b.normal.begin(), b.normal.end());
        }
        return a.offset < b.offset;
    }
};

struct Constraint
{
    RationalVector coefficients;
    Relation relation = Relation::less_equal;
    Rational rhs;
};

/// Raised for solver faults: repeated cuts, exhausted iteration budgets, or
/// inconsistent input. Infeasible/unbounded outcomes are results, not faults.
class LpFault : public std::runtime_error
{
public:
    explicit LpFault(const std::string& what) : std::runtime_error(what) {}
};

class LinearProgram
{
public:
    /// Returns the variable's index. Bounds default to x >= 0; pass nullopt for -inf / +inf.
    std::size_t add_variable(std::string name, std::optional<Rational> lower = Rational(0),
                             std::optional<Rational> upper = std::nullopt);

    /// Coefficients are dense over the variables declared so far (missing tail = 0).
    void set_objective(Sense sense, RationalVector coefficients);
    void add_constraint(RationalVector coefficients, Relation relation, Rational rhs);
    void add_constraint(const Hyperplane& cut);

    std::size_t num_variables() const { return names_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::string& name(std::size_t k) const { return names_[k]; }
    const std::optional<Rational>& lower(std::size_t k) const { return lower_[k]; }
    const std::optional<Rational>& upper(std::size_t k) const { return upper_[k]; }
    Sense sense() const { return sense_; }
    const RationalVector& objective() const { return objective_; }

    /// Evaluates objective . x
    Rational objective_value(std::span<const Rational> point) const;
    /// True iff the point satisfies every bound and explicit constraint exactly.
    bool is_feasible(std::span<const Rational> point) const;

private:
    std::vector<std::string> names_;
    std::vector<std::optional<Rational>> lower_;
    std::vector<std::optional<Rational>> upper_;
    Sense sense_ = Sense::maximize;
    RationalVector objective_;
    std::vector<Constraint> constraints_;
};

enum class LpStatus
{
    optimal,
    infeasible,
    unbounded,
};

std::string to_string(LpStatus status);

struct LpSolution
{
    LpStatus status = LpStatus::infeasible;
    RationalVector point;  // valid when optimal
    Rational value;        // objective value when optimal
    std::size_t pivots = 0;
};

struct SolveOptions
{
    std::ostream* trace = nullptr;  // pivot-by-pivot dump when set
};

/// Exact two-phase simplex with Bland's rule. The optimal point is a vertex
/// (basic feasible solution) of the feasible region.
LpSolution solve(const LinearProgram& program, const SolveOptions& options = {});

/// Returns nullopt when the point is acceptable, otherwise a violated cut.
using ConstraintOracle = std::function<std::optional<Hyperplane>(std::span<const Rational>)>;

struct OracleOptions
{
    /// 0 selects the default 10 * d * (d + 1) with d the number of variables.
    std::size_t max_iterations = 0;
    std::ostream* trace = nullptr;
};

struct OracleSolution
{
    LpSolution solution;
    std::vector<Hyperplane> cuts;  // in generation order
    std::size_t iterations = 0;
};

/// Cutting-plane loop: solve with the explicit constraints plus accumulated
/// cuts, query the oracle at the optimum, add its cut, repeat. Throws LpFault
/// when a cut repeats (unsound oracle) or the iteration cap is exceeded.
OracleSolution solve_with_oracle(const LinearProgram& program, const ConstraintOracle& oracle,
                                 const OracleOptions& options = {});

/// Objective perturbation that makes the maximizer over any polytope whose
/// corners have coordinates of bit complexity `corner_bits` unique, while
/// keeping it among the maximizers of the original objective: with Q the
/// product of the denominators, b_i = (a_i * Q + 2^-(1 + l2 + (2 d l2 + 1) i)) / Q
/// for 1-based i.
RationalVector perturb_objective(const RationalVector& objective, std::size_t corner_bits);

}  // namespace revmech
