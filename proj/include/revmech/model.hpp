#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "revmech/feasibility.hpp"
#include "revmech/rational.hpp"

namespace revmech {

class InstanceError : public std::runtime_error
{
public:
    explicit InstanceError(const std::string& what) : std::runtime_error(what) {}
};

struct BidderType
{
    RationalVector values;  // one per item, normalized into [0,1]
    std::string label;

    friend bool operator==(const BidderType&, const BidderType&) = default;
};

/// One type index per bidder.
using Profile = std::vector<std::size_t>;

struct WeightedProfile
{
    Profile profile;
    Rational probability;

    friend bool operator==(const WeightedProfile&, const WeightedProfile&) = default;
};

/// Vector indexed by (bidder i, type A in T_i, item j). Coordinates are laid out
/// bidder-major, then type, then item, so pi_i(A) is a contiguous block of n.
template <class Tag>
struct TypeIndexed
{
    RationalVector entries;

    TypeIndexed() = default;
    explicit TypeIndexed(RationalVector values) : entries(std::move(values)) {}

    std::size_t size() const { return entries.size(); }
    Rational& operator[](std::size_t k) { return entries[k]; }
    const Rational& operator[](std::size_t k) const { return entries[k]; }

    friend bool operator==(const TypeIndexed&, const TypeIndexed&) = default;
};

struct ReducedFormTag;
struct WeightTag;
struct SecondOrderReducedFormTag;
struct SecondOrderWeightTag;

using ReducedForm = TypeIndexed<ReducedFormTag>;
using WeightVector = TypeIndexed<WeightTag>;
/// Indexed by (bidder i, reported type A, true type B, item j), same nesting order.
using SecondOrderReducedForm = TypeIndexed<SecondOrderReducedFormTag>;
using SecondOrderWeights = TypeIndexed<SecondOrderWeightTag>;

enum class DistributionKind
{
    independent,
    correlated,
};

/// A finite-support auction instance. Immutable after construction.
class Instance
{
public:
    /// Independent bidders: probabilities[i][A] = Pr[t_i = A].
    static Instance independent(std::vector<std::vector<BidderType>> type_spaces,
                                std::vector<RationalVector> probabilities, std::size_t items,
                                FeasibilitySpec feasibility, std::optional<RationalVector> budgets = std::nullopt,
                                Rational scale = 1);

    /// Correlated bidders given by an explicit joint over profiles.
    static Instance correlated(std::vector<std::vector<BidderType>> type_spaces, std::vector<WeightedProfile> joint,
                               std::size_t items, FeasibilitySpec feasibility,
                               std::optional<RationalVector> budgets = std::nullopt, Rational scale = 1);

    std::size_t bidders() const { return type_spaces_.size(); }
    std::size_t items() const { return items_; }
    std::size_t num_types(std::size_t bidder) const { return type_spaces_[bidder].size(); }
    std::size_t total_types() const { return total_types_; }
    const std::vector<std::vector<BidderType>>& type_spaces() const { return type_spaces_; }
    const BidderType& type(std::size_t bidder, std::size_t type_index) const
    {
        return type_spaces_[bidder][type_index];
    }

    DistributionKind distribution() const { return kind_; }
    bool is_independent() const { return kind_ == DistributionKind::independent; }
    const FeasibilitySpec& feasibility() const { return feasibility_; }
    const std::optional<RationalVector>& budgets() const { return budgets_; }
    const Rational& scale() const { return scale_; }

    /// Pr[t_i = A] (the marginal, also for correlated instances).
    const Rational& type_probability(std::size_t bidder, std::size_t type_index) const
    {
        return marginals_[bidder][type_index];
    }
    const std::vector<RationalVector>& marginals() const { return marginals_; }

    /// The joint (correlated instances only), sorted lexicographically.
    const std::vector<WeightedProfile>& joint() const { return joint_; }

    /// d = n * sum_i |T_i|
    std::size_t dimension() const { return items_ * total_types_; }
    std::size_t coordinate(std::size_t bidder, std::size_t type_index, std::size_t item) const
    {
        return (type_offset_[bidder] + type_index) * items_ + item;
    }

    /// n * sum_i |T_i|^2
    std::size_t second_order_dimension() const { return items_ * square_offset_.back(); }
    std::size_t second_order_coordinate(std::size_t bidder, std::size_t reported, std::size_t truth,
                                        std::size_t item) const
    {
        return (square_offset_[bidder] + reported * num_types(bidder) + truth) * items_ + item;
    }

    /// Support of D with probabilities, lexicographic by bidder then type index.
    std::vector<WeightedProfile> profile_space() const;
    std::size_t support_size() const;

    /// Every profile in the product of type spaces (support or not), lexicographic.
    std::vector<Profile> product_profiles() const;
    std::size_t product_size() const;

    /// Pr[v] under D (zero for profiles outside the support).
    Rational profile_probability(const Profile& profile) const;

    /// Pr[v_{-i} | t_i = truth] where v_{-i} is read from `profile` (entry i ignored).
    Rational conditional_probability(std::size_t bidder, std::size_t truth, const Profile& profile) const;

    /// D_{-i}(A): the conditional distribution of the other bidders given t_i = A.
    /// Returned profiles carry A in entry i. Throws if Pr[t_i = A] = 0.
    std::vector<WeightedProfile> conditional_others(std::size_t bidder, std::size_t type_index) const;

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    Instance() = default;
    void finish_construction();

    std::vector<std::vector<BidderType>> type_spaces_;
    std::size_t items_ = 0;
    DistributionKind kind_ = DistributionKind::independent;
    std::vector<RationalVector> marginals_;
    std::vector<WeightedProfile> joint_;
    std::map<Profile, Rational> joint_lookup_;
    FeasibilitySpec feasibility_;
    std::optional<RationalVector> budgets_;
    Rational scale_ = 1;

    std::size_t total_types_ = 0;
    std::vector<std::size_t> type_offset_;
    std::vector<std::size_t> square_offset_;
};

/// Parses the JSON instance document. Raw values are divided by the largest
/// value so that every value lies in [0,1]; budgets are divided by the same scale.
Instance load_instance(const nlohmann::json& document);
Instance load_instance_text(const std::string& text);
Instance load_instance_file(const std::string& path);

/// Serializes with raw (de-normalized) values; load_instance(to_json(x)) == x.
nlohmann::json to_json(const Instance& instance);

/// Sets object[key] to the "p/q" string and object[key + "_decimal"] to a display double.
void put_rational(nlohmann::json& object, const std::string& key, const Rational& value);
void put_rational_array(nlohmann::json& object, const std::string& key, const RationalVector& values);

/// Accepts rational strings, or JSON numbers (converted through their decimal text).
Rational rational_from_json(const nlohmann::json& value);
RationalVector rational_array_from_json(const nlohmann::json& document);
nlohmann::json rational_strings(const RationalVector& values);

}  // namespace revmech
