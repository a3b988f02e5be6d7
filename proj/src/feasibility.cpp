#include "revmech/feasibility.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace revmech {

Allocation::Allocation(std::vector<Assignment> assignments) : assignments_(std::move(assignments))
{
    std::sort(assignments_.begin(), assignments_.end());
    assignments_.erase(std::unique(assignments_.begin(), assignments_.end()), assignments_.end());
}

bool Allocation::contains(std::size_t bidder, std::size_t item) const
{
    return std::binary_search(assignments_.begin(), assignments_.end(), Assignment{bidder, item});
}

std::string to_string(const Allocation& allocation)
{
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (const auto& a : allocation.assignments()) {
        out << (first ? "" : ",") << '(' << a.bidder << ',' << a.item << ')';
        first = false;
    }
    out << '}';
    return out.str();
}

WeightMatrix::WeightMatrix(std::size_t bidders, std::size_t items)
    : bidders_(bidders), items_(items), data_(bidders * items, Rational(0))
{
}

WeightMatrix::WeightMatrix(std::initializer_list<std::initializer_list<Rational>> rows)
{
    bidders_ = rows.size();
    items_ = bidders_ == 0 ? 0 : rows.begin()->size();
    for (const auto& row : rows) {
        if (row.size() != items_) {
            throw std::invalid_argument("WeightMatrix: ragged rows");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Rational WeightMatrix::weight_of(const Allocation& allocation) const
{
    Rational total = 0;
    for (const auto& a : allocation.assignments()) {
        total += (*this)(a.bidder, a.item);
    }
    return total;
}

FeasibilitySpec FeasibilitySpec::explicit_family(std::vector<Allocation> allocations)
{
    FeasibilitySpec spec;
    spec.kind = FeasibilityKind::explicit_family;
    spec.allocations = std::move(allocations);
    return spec;
}

FeasibilitySpec FeasibilitySpec::single_item(bool allow_empty)
{
    FeasibilitySpec spec;
    spec.kind = FeasibilityKind::single_item;
    spec.allow_empty = allow_empty;
    return spec;
}

FeasibilitySpec FeasibilitySpec::per_item_supply()
{
    FeasibilitySpec spec;
    spec.kind = FeasibilityKind::per_item_supply;
    return spec;
}

FeasibilitySpec FeasibilitySpec::unit_demand_matching()
{
    FeasibilitySpec spec;
    spec.kind = FeasibilityKind::unit_demand_matching;
    return spec;
}

FeasibilitySpec FeasibilitySpec::public_project()
{
    FeasibilitySpec spec;
    spec.kind = FeasibilityKind::public_project;
    return spec;
}

void FeasibilitySpec::validate(std::size_t bidders, std::size_t items) const
{
    switch (kind) {
    case FeasibilityKind::explicit_family:
        if (allocations.empty()) {
            throw FeasibilityError("explicit feasibility family is empty");
        }
        for (const auto& alloc : allocations) {
            for (const auto& a : alloc.assignments()) {
                if (a.bidder >= bidders || a.item >= items) {
                    throw FeasibilityError("explicit allocation " + to_string(alloc) +
                                           " refers to an out-of-range pair");
                }
            }
        }
        break;
    case FeasibilityKind::single_item:
        if (items != 1) {
            throw FeasibilityError("single_item feasibility requires exactly one item");
        }
        break;
    default:
        break;
    }
}

std::string kind_name(FeasibilityKind kind)
{
    switch (kind) {
    case FeasibilityKind::explicit_family:
        return "explicit";
    case FeasibilityKind::single_item:
        return "single_item";
    case FeasibilityKind::per_item_supply:
        return "per_item_supply";
    case FeasibilityKind::unit_demand_matching:
        return "unit_demand_matching";
    case FeasibilityKind::public_project:
        return "public_project";
    }
    return "unknown";
}

namespace {

Allocation solve_explicit(const FeasibilitySpec& spec, const WeightMatrix& weights)
{
    if (spec.allocations.empty()) {
        throw FeasibilityError("explicit feasibility family is empty");
    }
    std::size_t best = 0;
    Rational best_weight = weights.weight_of(spec.allocations[0]);
    for (std::size_t k = 1; k < spec.allocations.size(); ++k) {
        Rational w = weights.weight_of(spec.allocations[k]);
        if (w > best_weight) {
            best_weight = w;
            best = k;
        }
    }
    return spec.allocations[best];
}

Allocation solve_single_item(const FeasibilitySpec& spec, const WeightMatrix& weights)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < weights.bidders(); ++i) {
        if (!best || weights(i, 0) > weights(*best, 0)) {
            best = i;
        }
    }
    if (!best || (spec.allow_empty && weights(*best, 0) <= 0)) {
        return {};
    }
    return Allocation({{*best, 0}});
}

Allocation solve_per_item(const WeightMatrix& weights)
{
    std::vector<Assignment> chosen;
    for (std::size_t j = 0; j < weights.items(); ++j) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < weights.bidders(); ++i) {
            if (weights(i, j) > 0 && (!best || weights(i, j) > weights(*best, j))) {
                best = i;
            }
        }
        if (best) {
            chosen.push_back({*best, j});
        }
    }
    return Allocation(std::move(chosen));
}

Allocation solve_public_project(const WeightMatrix& weights)
{
    std::vector<Assignment> chosen;
    for (std::size_t j = 0; j < weights.items(); ++j) {
        Rational total = 0;
        for (std::size_t i = 0; i < weights.bidders(); ++i) {
            total += weights(i, j);
        }
        if (total > 0) {
            for (std::size_t i = 0; i < weights.bidders(); ++i) {
                chosen.push_back({i, j});
            }
        }
    }
    return Allocation(std::move(chosen));
}

}  // namespace

Allocation max_weight_matching_nonnegative(const WeightMatrix& weights)
{
    // Kuhn-Munkres with potentials on the square k x k cost matrix -w, padded with zeros.
    const std::size_t rows = weights.bidders();
    const std::size_t cols = weights.items();
    const std::size_t k = std::max(rows, cols);
    if (k == 0) {
        return {};
    }
    auto cost = [&](std::size_t i, std::size_t j) -> Rational {
        if (i < rows && j < cols) {
            return -weights(i, j);
        }
        return 0;
    };
    Rational magnitude = 1;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (weights(i, j) < 0) {
                throw std::invalid_argument("max_weight_matching_nonnegative: negative weight");
            }
            magnitude += weights(i, j);
        }
    }
    const Rational infinity = magnitude * 4 * Rational(static_cast<long>(k + 1));

    std::vector<Rational> u(k + 1, Rational(0)), v(k + 1, Rational(0));
    std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);
    for (std::size_t i = 1; i <= k; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<Rational> min_reduced(k + 1, infinity);
        std::vector<bool> used(k + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            Rational delta = infinity;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) {
                    continue;
                }
                Rational cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_reduced[j]) {
                    min_reduced[j] = cur;
                    way[j] = j0;
                }
                if (min_reduced[j] < delta) {
                    delta = min_reduced[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_reduced[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Assignment> chosen;
    for (std::size_t j = 1; j <= k; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) {
            chosen.push_back({i - 1, j - 1});
        }
    }
    return Allocation(std::move(chosen));
}

MaxWeightSolver negative_weight_adapter(MaxWeightSolver nonnegative_solver)
{
    return [solver = std::move(nonnegative_solver)](const WeightMatrix& weights) {
        WeightMatrix clipped = weights;
        for (std::size_t i = 0; i < weights.bidders(); ++i) {
            for (std::size_t j = 0; j < weights.items(); ++j) {
                if (clipped(i, j) < 0) {
                    clipped(i, j) = 0;
                }
            }
        }
        Allocation raw = solver(clipped);
        std::vector<Assignment> kept;
        for (const auto& a : raw.assignments()) {
            if (weights(a.bidder, a.item) >= 0) {
                kept.push_back(a);
            }
        }
        return Allocation(std::move(kept));
    };
}

Allocation max_weight_allocation(const FeasibilitySpec& spec, const WeightMatrix& weights)
{
    switch (spec.kind) {
    case FeasibilityKind::explicit_family:
        return solve_explicit(spec, weights);
    case FeasibilityKind::single_item:
        return solve_single_item(spec, weights);
    case FeasibilityKind::per_item_supply:
        return solve_per_item(weights);
    case FeasibilityKind::unit_demand_matching: {
        static const MaxWeightSolver matching = negative_weight_adapter(max_weight_matching_nonnegative);
        return matching(weights);
    }
    case FeasibilityKind::public_project:
        return solve_public_project(weights);
    }
    throw FeasibilityError("unknown feasibility kind");
}

bool validate_allocation(const FeasibilitySpec& spec, const Allocation& allocation, std::size_t bidders,
                         std::size_t items)
{
    for (const auto& a : allocation.assignments()) {
        if (a.bidder >= bidders || a.item >= items) {
            return false;
        }
    }
    const auto& as = allocation.assignments();
    switch (spec.kind) {
    case FeasibilityKind::explicit_family:
        return std::find(spec.allocations.begin(), spec.allocations.end(), allocation) != spec.allocations.end();
    case FeasibilityKind::single_item:
        if (allocation.empty()) {
            return spec.allow_empty;
        }
        return allocation.size() == 1;
    case FeasibilityKind::per_item_supply:
    case FeasibilityKind::unit_demand_matching: {
        const bool unit_demand = spec.kind == FeasibilityKind::unit_demand_matching;
        for (std::size_t x = 0; x < as.size(); ++x) {
            for (std::size_t y = x + 1; y < as.size(); ++y) {
                if (as[x].item == as[y].item || (unit_demand && as[x].bidder == as[y].bidder)) {
                    return false;
                }
            }
        }
        return true;
    }
    case FeasibilityKind::public_project:
        for (std::size_t j = 0; j < items; ++j) {
            std::size_t holders = 0;
            for (std::size_t i = 0; i < bidders; ++i) {
                holders += allocation.contains(i, j) ? 1 : 0;
            }
            if (holders != 0 && holders != bidders) {
                return false;
            }
        }
        return true;
    }
    return false;
}

std::vector<Allocation> expand_family(const FeasibilitySpec& spec, std::size_t bidders, std::size_t items)
{
    spec.validate(bidders, items);
    if (spec.kind == FeasibilityKind::explicit_family) {
        return spec.allocations;
    }
    const std::size_t pairs = bidders * items;
    if (pairs > 20) {
        throw FeasibilityError("expand_family: assignment space too large to enumerate");
    }
    std::vector<Allocation> family;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
        std::vector<Assignment> as;
        for (std::size_t p = 0; p < pairs; ++p) {
            if (mask & (std::size_t{1} << p)) {
                as.push_back({p / items, p % items});
            }
        }
        Allocation alloc(std::move(as));
        if (validate_allocation(spec, alloc, bidders, items)) {
            family.push_back(std::move(alloc));
        }
    }
    return family;
}

nlohmann::json to_json(const FeasibilitySpec& spec)
{
    nlohmann::json doc;
    doc["kind"] = kind_name(spec.kind);
    if (spec.kind == FeasibilityKind::explicit_family) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& alloc : spec.allocations) {
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& a : alloc.assignments()) {
                pairs.push_back({a.bidder, a.item});
            }
            list.push_back(pairs);
        }
        doc["allocations"] = list;
    }
    if (spec.kind == FeasibilityKind::single_item) {
        doc["allow_empty"] = spec.allow_empty;
    }
    return doc;
}

FeasibilitySpec feasibility_from_json(const nlohmann::json& document)
{
    if (!document.is_object() || !document.contains("kind") || !document["kind"].is_string()) {
        throw FeasibilityError("feasibility must be an object with a string \"kind\"");
    }
    const std::string kind = document["kind"].get<std::string>();
    if (kind == "explicit") {
        if (!document.contains("allocations") || !document["allocations"].is_array()) {
            throw FeasibilityError("explicit feasibility requires an \"allocations\" array");
        }
        std::vector<Allocation> allocations;
        for (const auto& entry : document["allocations"]) {
            if (!entry.is_array()) {
                throw FeasibilityError("each explicit allocation must be an array of [bidder, item] pairs");
            }
            std::vector<Assignment> as;
            for (const auto& pair : entry) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                    !pair[1].is_number_unsigned()) {
                    throw FeasibilityError("malformed [bidder, item] pair in explicit allocation");
                }
                as.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
            }
            allocations.emplace_back(std::move(as));
        }
        return FeasibilitySpec::explicit_family(std::move(allocations));
    }
    if (kind == "single_item") {
        bool allow_empty = document.value("allow_empty", true);
        return FeasibilitySpec::single_item(allow_empty);
    }
    if (kind == "per_item_supply") {
        return FeasibilitySpec::per_item_supply();
    }
    if (kind == "unit_demand_matching") {
        return FeasibilitySpec::unit_demand_matching();
    }
    if (kind == "public_project") {
        return FeasibilitySpec::public_project();
    }
    throw FeasibilityError("unknown feasibility kind \"" + kind + "\"");
}

}  // namespace revmech
