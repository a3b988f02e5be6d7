#include "revmech/ratlp.hpp"

#include <ostream>
#include <set>

namespace revmech {

std::size_t LinearProgram::add_variable(std::string name, std::optional<Rational> lower, std::optional<Rational> upper)
{
    names_.push_back(std::move(name));
    lower_.push_back(std::move(lower));
    upper_.push_back(std::move(upper));
    return names_.size() - 1;
}

void LinearProgram::set_objective(Sense sense, RationalVector coefficients)
{
    if (coefficients.size() > num_variables()) {
        throw std::invalid_argument("objective has more coefficients than variables");
    }
    sense_ = sense;
    objective_ = std::move(coefficients);
}

void LinearProgram::add_constraint(RationalVector coefficients, Relation relation, Rational rhs)
{
    if (coefficients.size() > num_variables()) {
        throw std::invalid_argument("constraint has more coefficients than variables");
    }
    constraints_.push_back({std::move(coefficients), relation, std::move(rhs)});
}

void LinearProgram::add_constraint(const Hyperplane& cut)
{
    add_constraint(cut.normal, Relation::less_equal, cut.offset);
}

Rational LinearProgram::objective_value(std::span<const Rational> point) const
{
    Rational value = 0;
    for (std::size_t k = 0; k < objective_.size(); ++k) {
        if (!objective_[k].is_zero()) {
            value += objective_[k] * point[k];
        }
    }
    return value;
}

bool LinearProgram::is_feasible(std::span<const Rational> point) const
{
    if (point.size() != num_variables()) {
        return false;
    }
    for (std::size_t k = 0; k < num_variables(); ++k) {
        if ((lower_[k] && point[k] < *lower_[k]) || (upper_[k] && point[k] > *upper_[k])) {
            return false;
        }
    }
    for (const auto& c : constraints_) {
        Rational lhs = 0;
        for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
            if (!c.coefficients[k].is_zero()) {
                lhs += c.coefficients[k] * point[k];
            }
        }
        switch (c.relation) {
        case Relation::less_equal:
            if (lhs > c.rhs) {
                return false;
            }
            break;
        case Relation::greater_equal:
            if (lhs < c.rhs) {
                return false;
            }
            break;
        case Relation::equal:
            if (lhs != c.rhs) {
                return false;
            }
            break;
        }
    }
    return true;
}

std::string to_string(LpStatus status)
{
    switch (status) {
    case LpStatus::optimal:
        return "optimal";
    case LpStatus::infeasible:
        return "infeasible";
    case LpStatus::unbounded:
        return "unbounded";
    }
    return "unknown";
}

namespace {

// x_k expressed through non-negative tableau columns.
struct VariableMap
{
    enum class Kind
    {
        shifted,    // x = base + y
        reflected,  // x = base - y
        split,      // x = y+ - y-
    };
    Kind kind = Kind::shifted;
    Rational base;
    std::size_t column = 0;
    std::size_t negative_column = 0;
};

class Tableau
{
public:
    Tableau(std::size_t rows, std::size_t columns)
        : columns_(columns), data_(rows, RationalVector(columns + 1, Rational(0))), basis_(rows, 0)
    {
    }

    std::size_t rows() const { return data_.size(); }
    std::size_t columns() const { return columns_; }
    Rational& at(std::size_t r, std::size_t c) { return data_[r][c]; }
    Rational& rhs(std::size_t r) { return data_[r][columns_]; }
    std::vector<std::size_t>& basis() { return basis_; }
    RationalVector& objective() { return objective_; }

    void set_objective(const RationalVector& costs)
    {
        // Reduced costs d_c = c_c - c_B B^-1 A_c; the last entry holds -z.
        objective_.assign(columns_ + 1, Rational(0));
        for (std::size_t c = 0; c < columns_; ++c) {
            objective_[c] = costs[c];
        }
        for (std::size_t r = 0; r < rows(); ++r) {
            const Rational& cb = costs[basis_[r]];
            if (cb.is_zero()) {
                continue;
            }
            for (std::size_t c = 0; c <= columns_; ++c) {
                if (!data_[r][c].is_zero()) {
                    objective_[c] -= cb * data_[r][c];
                }
            }
        }
    }

    void pivot(std::size_t row, std::size_t column)
    {
        RationalVector& prow = data_[row];
        const Rational inverse = 1 / prow[column];
        std::vector<std::size_t> nonzero;
        for (std::size_t c = 0; c <= columns_; ++c) {
            if (!prow[c].is_zero()) {
                prow[c] *= inverse;
                nonzero.push_back(c);
            }
        }
        auto eliminate = [&](RationalVector& target) {
            if (target[column].is_zero()) {
                return;
            }
            const Rational factor = target[column];
            for (std::size_t c : nonzero) {
                target[c] -= factor * prow[c];
            }
        };
        for (std::size_t r = 0; r < rows(); ++r) {
            if (r != row) {
                eliminate(data_[r]);
            }
        }
        eliminate(objective_);
        basis_[row] = column;
    }

    /// Bland's rule. `allowed` bounds the entering columns. Returns false on unboundedness.
    bool optimize(std::size_t allowed, std::size_t& pivots, std::ostream* trace)
    {
        while (true) {
            std::size_t entering = allowed;
            for (std::size_t c = 0; c < allowed; ++c) {
                if (objective_[c] > 0) {
                    entering = c;
                    break;
                }
            }
            if (entering == allowed) {
                return true;
            }
            std::optional<std::size_t> leaving;
            Rational best_ratio;
            for (std::size_t r = 0; r < rows(); ++r) {
                const Rational& coeff = data_[r][entering];
                if (coeff <= 0) {
                    continue;
                }
                Rational ratio = data_[r][columns_] / coeff;
                if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*leaving])) {
                    leaving = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (!leaving) {
                return false;
            }
            if (trace) {
                *trace << "pivot " << pivots << ": enter col " << entering << ", leave row " << *leaving
                       << " (basic col " << basis_[*leaving] << "), ratio " << to_string(best_ratio) << '\n';
            }
            pivot(*leaving, entering);
            ++pivots;
        }
    }

    void remove_row(std::size_t row)
    {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(row));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(row));
    }

private:
    std::size_t columns_;
    std::vector<RationalVector> data_;
    std::vector<std::size_t> basis_;
    RationalVector objective_;
};

}  // namespace

LpSolution solve(const LinearProgram& program, const SolveOptions& options)
{
    const std::size_t nvars = program.num_variables();

    // Map every variable onto non-negative structural columns.
    std::vector<VariableMap> maps(nvars);
    std::size_t structural = 0;
    struct Row
    {
        RationalVector coefficients;  // over structural columns, filled later
        Relation relation;
        Rational rhs;
    };
    std::vector<std::pair<std::size_t, Rational>> bound_rows;  // (column, upper) for y <= upper
    for (std::size_t k = 0; k < nvars; ++k) {
        const auto& lo = program.lower(k);
        const auto& hi = program.upper(k);
        if (lo) {
            maps[k] = {VariableMap::Kind::shifted, *lo, structural++, 0};
            if (hi) {
                bound_rows.emplace_back(maps[k].column, *hi - *lo);
            }
        } else if (hi) {
            maps[k] = {VariableMap::Kind::reflected, *hi, structural++, 0};
        } else {
            maps[k] = {VariableMap::Kind::split, 0, structural, structural + 1};
            structural += 2;
        }
    }

    std::vector<Row> rows;
    for (const auto& c : program.constraints()) {
        Row row{RationalVector(structural, Rational(0)), c.relation, c.rhs};
        for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
            const Rational& a = c.coefficients[k];
            if (a.is_zero()) {
                continue;
            }
            const VariableMap& vm = maps[k];
            switch (vm.kind) {
            case VariableMap::Kind::shifted:
                row.coefficients[vm.column] += a;
                row.rhs -= a * vm.base;
                break;
            case VariableMap::Kind::reflected:
                row.coefficients[vm.column] -= a;
                row.rhs -= a * vm.base;
                break;
            case VariableMap::Kind::split:
                row.coefficients[vm.column] += a;
                row.coefficients[vm.negative_column] -= a;
                break;
            }
        }
        rows.push_back(std::move(row));
    }
    for (auto& [column, upper] : bound_rows) {
        Row row{RationalVector(structural, Rational(0)), Relation::less_equal, upper};
        row.coefficients[column] = 1;
        rows.push_back(std::move(row));
    }
    for (auto& row : rows) {
        if (row.rhs < 0) {
            for (auto& a : row.coefficients) {
                a = -a;
            }
            row.rhs = -row.rhs;
            if (row.relation == Relation::less_equal) {
                row.relation = Relation::greater_equal;
            } else if (row.relation == Relation::greater_equal) {
                row.relation = Relation::less_equal;
            }
        }
    }

    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& row : rows) {
        slack_count += row.relation == Relation::equal ? 0 : 1;
        artificial_count += row.relation == Relation::less_equal ? 0 : 1;
    }
    const std::size_t first_artificial = structural + slack_count;
    const std::size_t total_columns = first_artificial + artificial_count;

    Tableau tableau(rows.size(), total_columns);
    std::size_t next_slack = structural;
    std::size_t next_artificial = first_artificial;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < structural; ++c) {
            tableau.at(r, c) = rows[r].coefficients[c];
        }
        tableau.rhs(r) = rows[r].rhs;
        switch (rows[r].relation) {
        case Relation::less_equal:
            tableau.at(r, next_slack) = 1;
            tableau.basis()[r] = next_slack++;
            break;
        case Relation::greater_equal:
            tableau.at(r, next_slack++) = -1;
            tableau.at(r, next_artificial) = 1;
            tableau.basis()[r] = next_artificial++;
            break;
        case Relation::equal:
            tableau.at(r, next_artificial) = 1;
            tableau.basis()[r] = next_artificial++;
            break;
        }
    }

    LpSolution result;
    if (artificial_count > 0) {
        RationalVector phase_one(total_columns, Rational(0));
        for (std::size_t c = first_artificial; c < total_columns; ++c) {
            phase_one[c] = -1;
        }
        tableau.set_objective(phase_one);
        if (options.trace) {
            *options.trace << "phase 1: " << tableau.rows() << " rows, " << total_columns << " columns\n";
        }
        tableau.optimize(total_columns, result.pivots, options.trace);
        // Objective row rhs stores -z; feasibility needs z = 0.
        if (tableau.objective()[total_columns] != 0) {
            result.status = LpStatus::infeasible;
            return result;
        }
        for (std::size_t r = tableau.rows(); r-- > 0;) {
            if (tableau.basis()[r] < first_artificial) {
                continue;
            }
            std::optional<std::size_t> replacement;
            for (std::size_t c = 0; c < first_artificial; ++c) {
                if (!tableau.at(r, c).is_zero()) {
                    replacement = c;
                    break;
                }
            }
            if (replacement) {
                tableau.pivot(r, *replacement);
                ++result.pivots;
            } else {
                tableau.remove_row(r);
            }
        }
    }

    RationalVector phase_two(total_columns, Rational(0));
    const Rational sign = program.sense() == Sense::maximize ? Rational(1) : Rational(-1);
    const auto& objective = program.objective();
    for (std::size_t k = 0; k < objective.size(); ++k) {
        const Rational& a = objective[k];
        if (a.is_zero()) {
            continue;
        }
        const VariableMap& vm = maps[k];
        switch (vm.kind) {
        case VariableMap::Kind::shifted:
            phase_two[vm.column] += sign * a;
            break;
        case VariableMap::Kind::reflected:
            phase_two[vm.column] -= sign * a;
            break;
        case VariableMap::Kind::split:
            phase_two[vm.column] += sign * a;
            phase_two[vm.negative_column] -= sign * a;
            break;
        }
    }
    tableau.set_objective(phase_two);
    if (options.trace) {
        *options.trace << "phase 2: " << tableau.rows() << " rows\n";
    }
    if (!tableau.optimize(first_artificial, result.pivots, options.trace)) {
        result.status = LpStatus::unbounded;
        return result;
    }

    RationalVector y(total_columns, Rational(0));
    for (std::size_t r = 0; r < tableau.rows(); ++r) {
        y[tableau.basis()[r]] = tableau.rhs(r);
    }
    result.point.assign(nvars, Rational(0));
    for (std::size_t k = 0; k < nvars; ++k) {
        const VariableMap& vm = maps[k];
        switch (vm.kind) {
        case VariableMap::Kind::shifted:
            result.point[k] = vm.base + y[vm.column];
            break;
        case VariableMap::Kind::reflected:
            result.point[k] = vm.base - y[vm.column];
            break;
        case VariableMap::Kind::split:
            result.point[k] = y[vm.column] - y[vm.negative_column];
            break;
        }
    }
    result.value = program.objective_value(result.point);
    result.status = LpStatus::optimal;
    if (options.trace) {
        *options.trace << "optimal value " << to_string(result.value) << " after " << result.pivots << " pivots\n";
    }
    return result;
}

OracleSolution solve_with_oracle(const LinearProgram& program, const ConstraintOracle& oracle,
                                 const OracleOptions& options)
{
    const std::size_t d = program.num_variables();
    const std::size_t cap = options.max_iterations != 0 ? options.max_iterations : 10 * d * (d + 1);
    LinearProgram relaxation = program;
    std::set<Hyperplane> seen;
    OracleSolution out;
    SolveOptions inner;
    inner.trace = options.trace;
    while (true) {
        out.solution = solve(relaxation, inner);
        if (out.solution.status != LpStatus::optimal) {
            return out;
        }
        std::optional<Hyperplane> cut = oracle(out.solution.point);
        if (!cut) {
            return out;
        }
        if (cut->normal.size() != d) {
            throw LpFault("oracle cut has the wrong dimension");
        }
        if (dot(cut->normal, out.solution.point) <= cut->offset) {
            throw LpFault("oracle returned a cut that the current point satisfies");
        }
        if (!seen.insert(*cut).second) {
            throw LpFault("oracle repeated a previously generated cut");
        }
        if (options.trace) {
            *options.trace << "cut " << out.cuts.size() << ": offset " << to_string(cut->offset) << '\n';
        }
        relaxation.add_constraint(*cut);
        out.cuts.push_back(std::move(*cut));
        if (++out.iterations > cap) {
            throw LpFault("cutting-plane iteration cap of " + std::to_string(cap) + " exceeded");
        }
    }
}

RationalVector perturb_objective(const RationalVector& objective, std::size_t corner_bits)
{
    const std::size_t d = objective.size();
    Integer common = 1;
    for (const auto& a : objective) {
        common *= denominator(a);
    }
    RationalVector result(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t exponent = 1 + corner_bits + (2 * d * corner_bits + 1) * (i + 1);
        result[i] = objective[i] + inverse_power_of_two(exponent) / Rational(common);
    }
    return result;
}

}  // namespace revmech
