#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "revmech/ratlp.hpp"

using namespace revmech;

TEST_CASE("one-variable programs")
{
    LinearProgram lp;
    lp.add_variable("x");
    lp.set_objective(Sense::maximize, {Rational(1)});
    lp.add_constraint({Rational(1)}, Relation::less_equal, Rational(1));
    LpSolution s = solve(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.point == RationalVector{Rational(1)});
    CHECK(s.value == 1);

    lp.add_constraint({Rational(1)}, Relation::greater_equal, Rational(2));
    CHECK(solve(lp).status == LpStatus::infeasible);
}

TEST_CASE("degenerate objective returns the first Bland vertex")
{
    LinearProgram lp;
    lp.add_variable("x");
    lp.add_variable("y");
    lp.set_objective(Sense::maximize, {Rational(1), Rational(1)});
    lp.add_constraint({Rational(1), Rational(1)}, Relation::less_equal, Rational(1));
    LpSolution s = solve(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == 1);
    CHECK(s.point == RationalVector{Rational(1), Rational(0)});
}

TEST_CASE("unbounded and free variables")
{
    LinearProgram lp;
    lp.add_variable("x", std::nullopt, std::nullopt);
    lp.set_objective(Sense::minimize, {Rational(1)});
    CHECK(solve(lp).status == LpStatus::unbounded);
    lp.add_constraint({Rational(1)}, Relation::greater_equal, Rational(-7, 2));
    LpSolution s = solve(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == Rational(-7, 2));
}

TEST_CASE("bounds, equalities and negative right-hand sides")
{
    LinearProgram lp;
    lp.add_variable("x", Rational(-1), Rational(1));
    lp.add_variable("y", std::nullopt, Rational(3));
    lp.add_variable("z", Rational(2), std::nullopt);
    lp.set_objective(Sense::maximize, {Rational(1), Rational(2), Rational(-1)});
    lp.add_constraint({Rational(1), Rational(1), Rational(0)}, Relation::equal, Rational(-1, 2));
    lp.add_constraint({Rational(0), Rational(-1), Rational(1)}, Relation::less_equal, Rational(2));
    LpSolution s = solve(lp);
    REQUIRE(s.status == LpStatus::optimal);
    // y = -1/2 - x is largest at x = -1; z >= 2 is then cheapest.
    CHECK(s.point == RationalVector{Rational(-1), Rational(1, 2), Rational(2)});
    CHECK(s.value == Rational(-2));
    CHECK(lp.is_feasible(s.point));
}

TEST_CASE("random programs: feasible optimum with no better vertex among perturbations")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        LinearProgram lp;
        for (std::size_t k = 0; k < n; ++k) {
            lp.add_variable("x" + std::to_string(k), Rational(0), Rational(static_cast<long>(1 + rng() % 3)));
        }
        RationalVector c(n);
        for (auto& x : c) {
            x = Rational(static_cast<long>(rng() % 7) - 3);
        }
        lp.set_objective(Sense::maximize, c);
        for (int r = 0; r < 3; ++r) {
            RationalVector a(n);
            for (auto& x : a) {
                x = Rational(static_cast<long>(rng() % 5) - 1);
            }
            lp.add_constraint(a, Relation::less_equal, Rational(static_cast<long>(rng() % 6)));
        }
        LpSolution s = solve(lp);
        REQUIRE(s.status == LpStatus::optimal);  // x = 0 is always feasible and the box is bounded
        CHECK(lp.is_feasible(s.point));
        // Grid search over a fine lattice of the box never beats the optimum.
        std::vector<long> idx(n, 0);
        while (true) {
            RationalVector p(n);
            for (std::size_t k = 0; k < n; ++k) {
                p[k] = Rational(idx[k], 2);
            }
            if (lp.is_feasible(p)) {
                CHECK(lp.objective_value(p) <= s.value);
            }
            std::size_t k = 0;
            while (k < n && ++idx[k] > 6) {
                idx[k++] = 0;
            }
            if (k == n) {
                break;
            }
        }
    }
}

TEST_CASE("cutting-plane loop")
{
    LinearProgram lp;
    lp.add_variable("x", Rational(-1), Rational(1));
    lp.add_variable("y", Rational(-1), Rational(1));
    lp.set_objective(Sense::maximize, {Rational(1), Rational(1)});

    auto always = [](std::span<const Rational>) { return std::optional<Hyperplane>{}; };
    OracleSolution plain = solve_with_oracle(lp, always);
    CHECK(plain.cuts.empty());
    CHECK(plain.solution.value == solve(lp).value);

    auto half_plane = [](std::span<const Rational> p) -> std::optional<Hyperplane> {
        if (p[0] + p[1] <= 1) {
            return std::nullopt;
        }
        return Hyperplane{{Rational(1), Rational(1)}, Rational(1)};
    };
    std::ostringstream trace;
    OracleOptions options;
    options.trace = &trace;
    OracleSolution cut = solve_with_oracle(lp, half_plane, options);
    CHECK(cut.solution.value == 1);
    CHECK(cut.cuts.size() >= 1);
    CHECK_FALSE(trace.str().empty());

    auto unsound = [](std::span<const Rational>) -> std::optional<Hyperplane> {
        return Hyperplane{{Rational(1), Rational(0)}, Rational(5)};
    };
    CHECK_THROWS_AS(solve_with_oracle(lp, unsound), LpFault);
}

TEST_CASE("objective perturbation")
{
    const RationalVector zero(3, Rational(0));
    const RationalVector b = perturb_objective(zero, 2);
    CHECK(b[0] > b[1]);
    CHECK(b[1] > b[2]);
    CHECK(b[2] > 0);

    const RationalVector a{Rational(1, 3)};
    const RationalVector a1 = perturb_objective(a, 4);
    CHECK(a1[0] > a[0]);
    CHECK(a1[0] - a[0] < inverse_power_of_two(4) / 3);

    // (1,0) and (0,1) tie under x + y; the perturbed objective separates all four corners.
    const RationalVector tie{Rational(1), Rational(1)};
    const RationalVector p = perturb_objective(tie, 1);
    const std::vector<RationalVector> corners{{Rational(0), Rational(0)}, {Rational(1), Rational(0)},
                                              {Rational(0), Rational(1)}, {Rational(1), Rational(1)}};
    std::set<Rational> values;
    for (const auto& c : corners) {
        values.insert(dot(p, c));
    }
    CHECK(values.size() == 4);
    CHECK(dot(p, corners[3]) == *values.rbegin());
}
