#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "revmech/model.hpp"
#include "revmech/ratlp.hpp"
#include "revmech/vvcg.hpp"

namespace revmech {

/// A polytope known through a tie-broken linear maximizer: maximize(w) returns
/// the unique vertex maximizing the perturbed objective, which also maximizes x.w.
struct PolytopeOracle
{
    struct Vertex
    {
        RationalVector point;
        RationalVector rule_weights;  // weights of the simple rule realizing the vertex
    };

    std::size_t dimension = 0;
    std::function<Vertex(const RationalVector&)> maximize;
};

/// Reduced-form polytope F(F,D): vertices of simple virtual VCG rules.
PolytopeOracle reduced_form_polytope(const Instance& instance);
/// Second-order polytope SO(F,D): vertices of perturbed second-order VCG rules.
PolytopeOracle second_order_polytope(const Instance& instance);

struct Witness
{
    RationalVector weights;  // w* in [-1,1]^d
    Rational value;          // t* = max over the polytope of x.w*

    friend bool operator==(const Witness&, const Witness&) = default;
};

struct FeasibilityVerdict
{
    bool feasible = false;
    std::optional<Witness> witness;  // set when infeasible

    /// x . w* <= t*
    Hyperplane witness_hyperplane() const;
};

struct GeometryOptions
{
    std::ostream* trace = nullptr;
    std::size_t max_iterations = 0;  // per cutting-plane loop; 0 = solver default
};

/// nullopt when R_F(w).w <= t, otherwise the violated cut z.R_F(w) - y <= 0
/// over the variables (z, y).
std::optional<Hyperplane> inner_oracle(const WeightVector& w, const Rational& t, const Instance& instance);
std::optional<Hyperplane> inner_oracle(const PolytopeOracle& polytope, const RationalVector& w, const Rational& t);

/// Minimizes t - pi.w over w in [-1,1]^d, t >= R(w).w for every generated cut.
/// A negative optimum yields the witness (w*, t*).
FeasibilityVerdict separation_oracle(const PolytopeOracle& polytope, const RationalVector& point,
                                     const GeometryOptions& options = {});
FeasibilityVerdict separation_oracle(const ReducedForm& pi, const Instance& instance,
                                     const GeometryOptions& options = {});
FeasibilityVerdict second_order_feasibility(const SecondOrderReducedForm& pi, const Instance& instance,
                                            const GeometryOptions& options = {});

class GeometryFault : public std::runtime_error
{
public:
    explicit GeometryFault(const std::string& what) : std::runtime_error(what) {}
};

struct Corner
{
    RationalVector point;
    RationalVector rule_weights;
};

/// Vertex of the polytope lying on every hyperplane in `tight`. Throws
/// GeometryFault when the result misses one of them.
Corner corner_oracle(const PolytopeOracle& polytope, const std::vector<Hyperplane>& tight);

struct ReducedFormCorner
{
    ReducedForm corner;
    WeightVector weights;  // tie-broken
};

ReducedFormCorner corner_oracle(const std::vector<Hyperplane>& tight, const Instance& instance);

struct WeightedVertex
{
    Rational probability;
    Corner corner;
};

/// Convex combination of at most dimension + 1 vertices equal to `point`.
/// Throws GeometryFault if the point is infeasible or a round stalls.
std::vector<WeightedVertex> decompose(const PolytopeOracle& polytope, const RationalVector& point,
                                      const GeometryOptions& options = {});

struct DecompositionComponent
{
    Rational probability;
    VirtualVcgRule rule;
};

struct Decomposition
{
    std::vector<DecompositionComponent> components;
};

Decomposition decompose(const ReducedForm& pi, const Instance& instance, const GeometryOptions& options = {});

/// sum_a p_a * reduced_form_of(rule_a), evaluated on `instance`.
ReducedForm reduced_form_of(const Decomposition& decomposition, const Instance& instance);

struct SecondOrderComponent
{
    Rational probability;
    SecondOrderVcgRule rule;
};

struct SecondOrderDecomposition
{
    std::vector<SecondOrderComponent> components;
};

SecondOrderDecomposition second_order_decompose(const SecondOrderReducedForm& pi, const Instance& instance,
                                                const GeometryOptions& options = {});
SecondOrderReducedForm second_order_reduced_form_of(const SecondOrderDecomposition& decomposition,
                                                    const Instance& instance);

nlohmann::json to_json(const FeasibilityVerdict& verdict);
nlohmann::json to_json(const Decomposition& decomposition);
Decomposition decomposition_from_json(const nlohmann::json& document);

}  // namespace revmech
