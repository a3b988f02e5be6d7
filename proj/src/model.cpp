#include "revmech/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace revmech {

namespace {

void check_type_spaces(const std::vector<std::vector<BidderType>>& type_spaces, std::size_t items)
{
    if (type_spaces.empty()) {
        throw InstanceError("instance needs at least one bidder");
    }
    if (items == 0) {
        throw InstanceError("instance needs at least one item");
    }
    for (std::size_t i = 0; i < type_spaces.size(); ++i) {
        if (type_spaces[i].empty()) {
            throw InstanceError("bidder " + std::to_string(i) + " has an empty type space");
        }
        for (std::size_t a = 0; a < type_spaces[i].size(); ++a) {
            const auto& values = type_spaces[i][a].values;
            if (values.size() != items) {
                throw InstanceError("bidder " + std::to_string(i) + " type " + std::to_string(a) + " has " +
                                    std::to_string(values.size()) + " values, expected " + std::to_string(items));
            }
            for (const auto& v : values) {
                if (v < 0 || v > 1) {
                    throw InstanceError("bidder " + std::to_string(i) + " type " + std::to_string(a) +
                                        " has a value outside [0,1] after normalization: " + to_string(v));
                }
            }
        }
    }
}

// Mixed-radix successor in lexicographic order (bidder 0 most significant).
bool next_profile(Profile& profile, const std::vector<std::size_t>& radix, std::size_t skip = SIZE_MAX)
{
    for (std::size_t k = profile.size(); k-- > 0;) {
        if (k == skip) {
            continue;
        }
        if (++profile[k] < radix[k]) {
            return true;
        }
        profile[k] = 0;
    }
    return false;
}

}  // namespace

Instance Instance::independent(std::vector<std::vector<BidderType>> type_spaces,
                               std::vector<RationalVector> probabilities, std::size_t items,
                               FeasibilitySpec feasibility, std::optional<RationalVector> budgets, Rational scale)
{
    check_type_spaces(type_spaces, items);
    if (probabilities.size() != type_spaces.size()) {
        throw InstanceError("probability table does not match the number of bidders");
    }
    for (std::size_t i = 0; i < type_spaces.size(); ++i) {
        if (probabilities[i].size() != type_spaces[i].size()) {
            throw InstanceError("bidder " + std::to_string(i) + " probability count does not match its types");
        }
        Rational total = 0;
        for (std::size_t a = 0; a < probabilities[i].size(); ++a) {
            if (probabilities[i][a] <= 0) {
                throw InstanceError("bidder " + std::to_string(i) + " type " + std::to_string(a) +
                                    " has non-positive probability " + to_string(probabilities[i][a]));
            }
            total += probabilities[i][a];
        }
        if (total != 1) {
            throw InstanceError("bidder " + std::to_string(i) + " probabilities sum to " + to_string(total));
        }
    }
    Instance inst;
    inst.type_spaces_ = std::move(type_spaces);
    inst.items_ = items;
    inst.kind_ = DistributionKind::independent;
    inst.marginals_ = std::move(probabilities);
    inst.feasibility_ = std::move(feasibility);
    inst.budgets_ = std::move(budgets);
    inst.scale_ = std::move(scale);
    inst.finish_construction();
    return inst;
}

Instance Instance::correlated(std::vector<std::vector<BidderType>> type_spaces, std::vector<WeightedProfile> joint,
                              std::size_t items, FeasibilitySpec feasibility, std::optional<RationalVector> budgets,
                              Rational scale)
{
    check_type_spaces(type_spaces, items);
    if (joint.empty()) {
        throw InstanceError("joint distribution is empty");
    }
    Instance inst;
    inst.marginals_.resize(type_spaces.size());
    for (std::size_t i = 0; i < type_spaces.size(); ++i) {
        inst.marginals_[i].assign(type_spaces[i].size(), Rational(0));
    }
    Rational total = 0;
    for (const auto& entry : joint) {
        if (entry.profile.size() != type_spaces.size()) {
            throw InstanceError("joint profile has the wrong number of bidders");
        }
        for (std::size_t i = 0; i < entry.profile.size(); ++i) {
            if (entry.profile[i] >= type_spaces[i].size()) {
                throw InstanceError("joint profile refers to unknown type " + std::to_string(entry.profile[i]) +
                                    " of bidder " + std::to_string(i));
            }
        }
        if (entry.probability <= 0) {
            throw InstanceError("joint profile has non-positive probability " + to_string(entry.probability));
        }
        if (!inst.joint_lookup_.emplace(entry.profile, entry.probability).second) {
            throw InstanceError("joint lists the same profile twice");
        }
        total += entry.probability;
        for (std::size_t i = 0; i < entry.profile.size(); ++i) {
            inst.marginals_[i][entry.profile[i]] += entry.probability;
        }
    }
    if (total != 1) {
        throw InstanceError("joint probabilities sum to " + to_string(total));
    }
    for (std::size_t i = 0; i < type_spaces.size(); ++i) {
        for (std::size_t a = 0; a < type_spaces[i].size(); ++a) {
            if (inst.marginals_[i][a] == 0) {
                throw InstanceError("bidder " + std::to_string(i) + " type " + std::to_string(a) +
                                    " has zero probability under the joint");
            }
        }
    }
    std::sort(joint.begin(), joint.end(),
              [](const WeightedProfile& a, const WeightedProfile& b) { return a.profile < b.profile; });
    inst.type_spaces_ = std::move(type_spaces);
    inst.items_ = items;
    inst.kind_ = DistributionKind::correlated;
    inst.joint_ = std::move(joint);
    inst.feasibility_ = std::move(feasibility);
    inst.budgets_ = std::move(budgets);
    inst.scale_ = std::move(scale);
    inst.finish_construction();
    return inst;
}

void Instance::finish_construction()
{
    try {
        feasibility_.validate(bidders(), items_);
    } catch (const FeasibilityError& e) {
        throw InstanceError(e.what());
    }
    if (budgets_ && budgets_->size() != bidders()) {
        throw InstanceError("budgets must list one value per bidder");
    }
    if (scale_ <= 0) {
        throw InstanceError("scale must be positive");
    }
    type_offset_.assign(bidders() + 1, 0);
    square_offset_.assign(bidders() + 1, 0);
    for (std::size_t i = 0; i < bidders(); ++i) {
        type_offset_[i + 1] = type_offset_[i] + num_types(i);
        square_offset_[i + 1] = square_offset_[i] + num_types(i) * num_types(i);
    }
    total_types_ = type_offset_.back();
}

std::vector<Profile> Instance::product_profiles() const
{
    std::vector<std::size_t> radix;
    for (const auto& space : type_spaces_) {
        radix.push_back(space.size());
    }
    std::vector<Profile> result;
    Profile current(bidders(), 0);
    do {
        result.push_back(current);
    } while (next_profile(current, radix));
    return result;
}

std::size_t Instance::product_size() const
{
    std::size_t count = 1;
    for (const auto& space : type_spaces_) {
        count *= space.size();
    }
    return count;
}

std::vector<WeightedProfile> Instance::profile_space() const
{
    if (kind_ == DistributionKind::correlated) {
        return joint_;
    }
    std::vector<WeightedProfile> result;
    for (auto& profile : product_profiles()) {
        Rational p = 1;
        for (std::size_t i = 0; i < bidders(); ++i) {
            p *= marginals_[i][profile[i]];
        }
        result.push_back({std::move(profile), std::move(p)});
    }
    return result;
}

std::size_t Instance::support_size() const
{
    return kind_ == DistributionKind::correlated ? joint_.size() : product_size();
}

Rational Instance::profile_probability(const Profile& profile) const
{
    if (kind_ == DistributionKind::correlated) {
        auto it = joint_lookup_.find(profile);
        return it == joint_lookup_.end() ? Rational(0) : it->second;
    }
    Rational p = 1;
    for (std::size_t i = 0; i < bidders(); ++i) {
        p *= marginals_[i][profile[i]];
    }
    return p;
}

Rational Instance::conditional_probability(std::size_t bidder, std::size_t truth, const Profile& profile) const
{
    if (kind_ == DistributionKind::independent) {
        Rational p = 1;
        for (std::size_t k = 0; k < bidders(); ++k) {
            if (k != bidder) {
                p *= marginals_[k][profile[k]];
            }
        }
        return p;
    }
    Profile full = profile;
    full[bidder] = truth;
    auto it = joint_lookup_.find(full);
    if (it == joint_lookup_.end()) {
        return 0;
    }
    return it->second / marginals_[bidder][truth];
}

std::vector<WeightedProfile> Instance::conditional_others(std::size_t bidder, std::size_t type_index) const
{
    if (bidder >= bidders() || type_index >= num_types(bidder)) {
        throw InstanceError("conditional_others: index out of range");
    }
    const Rational& marginal = marginals_[bidder][type_index];
    if (marginal == 0) {
        throw InstanceError("cannot condition on a zero-probability type");
    }
    std::vector<WeightedProfile> result;
    if (kind_ == DistributionKind::correlated) {
        for (const auto& entry : joint_) {
            if (entry.profile[bidder] == type_index) {
                result.push_back({entry.profile, entry.probability / marginal});
            }
        }
        return result;
    }
    std::vector<std::size_t> radix;
    for (const auto& space : type_spaces_) {
        radix.push_back(space.size());
    }
    Profile current(bidders(), 0);
    current[bidder] = type_index;
    do {
        Rational p = 1;
        for (std::size_t k = 0; k < bidders(); ++k) {
            if (k != bidder) {
                p *= marginals_[k][current[k]];
            }
        }
        result.push_back({current, std::move(p)});
    } while (next_profile(current, radix, bidder));
    return result;
}

// ---------------------------------------------------------------------------
// JSON

Rational rational_from_json(const nlohmann::json& value)
{
    if (value.is_string()) {
        return parse_rational(value.get<std::string>());
    }
    if (value.is_number()) {
        return parse_rational(value.dump());
    }
    throw ParseError("expected a rational string, got " + value.dump());
}

RationalVector rational_array_from_json(const nlohmann::json& document)
{
    if (!document.is_array()) {
        throw ParseError("expected an array of rationals");
    }
    RationalVector result;
    for (const auto& v : document) {
        result.push_back(rational_from_json(v));
    }
    return result;
}

nlohmann::json rational_strings(const RationalVector& values)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : values) {
        out.push_back(to_string(v));
    }
    return out;
}

void put_rational(nlohmann::json& object, const std::string& key, const Rational& value)
{
    object[key] = to_string(value);
    object[key + "_decimal"] = to_double(value);
}

void put_rational_array(nlohmann::json& object, const std::string& key, const RationalVector& values)
{
    object[key] = rational_strings(values);
    nlohmann::json decimals = nlohmann::json::array();
    for (const auto& v : values) {
        decimals.push_back(to_double(v));
    }
    object[key + "_decimal"] = decimals;
}

Instance load_instance(const nlohmann::json& document)
{
    try {
        if (!document.is_object()) {
            throw InstanceError("instance document must be a JSON object");
        }
        for (const char* key : {"bidders", "items", "types", "feasibility"}) {
            if (!document.contains(key)) {
                throw InstanceError(std::string("instance is missing \"") + key + "\"");
            }
        }
        const auto bidders = document["bidders"].get<std::size_t>();
        const auto items = document["items"].get<std::size_t>();
        const auto& types = document["types"];
        if (!types.is_array() || types.size() != bidders) {
            throw InstanceError("\"types\" must be an array with one entry per bidder");
        }
        const bool has_joint = document.contains("joint");

        std::vector<std::vector<BidderType>> spaces(bidders);
        std::vector<RationalVector> probabilities(bidders);
        Rational largest = 0;
        for (std::size_t i = 0; i < bidders; ++i) {
            if (!types[i].is_array()) {
                throw InstanceError("types of bidder " + std::to_string(i) + " must be an array");
            }
            for (const auto& t : types[i]) {
                BidderType type;
                type.values = rational_array_from_json(t.at("values"));
                if (type.values.size() != items) {
                    throw InstanceError("ragged value vector for bidder " + std::to_string(i) + ": expected " +
                                        std::to_string(items) + " values");
                }
                for (const auto& v : type.values) {
                    if (v < 0) {
                        throw InstanceError("negative value " + to_string(v) + " for bidder " + std::to_string(i));
                    }
                    largest = std::max(largest, v);
                }
                type.label = t.value("label", std::string());
                if (!has_joint) {
                    if (!t.contains("prob")) {
                        throw InstanceError("type of bidder " + std::to_string(i) + " lacks \"prob\"");
                    }
                    probabilities[i].push_back(rational_from_json(t["prob"]));
                }
                spaces[i].push_back(std::move(type));
            }
        }
        Rational scale = largest == 0 ? Rational(1) : largest;
        if (document.contains("scale")) {
            scale = rational_from_json(document["scale"]);
            if (scale <= 0) {
                throw InstanceError("scale must be positive");
            }
        }
        for (auto& space : spaces) {
            for (auto& type : space) {
                for (auto& v : type.values) {
                    v /= scale;
                }
            }
        }
        std::optional<RationalVector> budgets;
        if (document.contains("budgets")) {
            budgets = rational_array_from_json(document["budgets"]);
            for (auto& b : *budgets) {
                b /= scale;
            }
        }
        FeasibilitySpec feasibility = feasibility_from_json(document["feasibility"]);
        if (has_joint) {
            std::vector<WeightedProfile> joint;
            for (const auto& entry : document["joint"]) {
                WeightedProfile wp;
                wp.profile = entry.at("profile").get<Profile>();
                wp.probability = rational_from_json(entry.at("prob"));
                joint.push_back(std::move(wp));
            }
            return Instance::correlated(std::move(spaces), std::move(joint), items, std::move(feasibility),
                                        std::move(budgets), scale);
        }
        return Instance::independent(std::move(spaces), std::move(probabilities), items, std::move(feasibility),
                                     std::move(budgets), scale);
    } catch (const InstanceError&) {
        throw;
    } catch (const std::exception& e) {
        throw InstanceError(e.what());
    }
}

Instance load_instance_text(const std::string& text)
{
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InstanceError(std::string("malformed JSON: ") + e.what());
    }
    return load_instance(document);
}

Instance load_instance_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InstanceError("cannot open instance file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_instance_text(buffer.str());
}

nlohmann::json to_json(const Instance& instance)
{
    nlohmann::json doc;
    doc["bidders"] = instance.bidders();
    doc["items"] = instance.items();
    doc["scale"] = to_string(instance.scale());
    nlohmann::json types = nlohmann::json::array();
    for (std::size_t i = 0; i < instance.bidders(); ++i) {
        nlohmann::json space = nlohmann::json::array();
        for (std::size_t a = 0; a < instance.num_types(i); ++a) {
            nlohmann::json t;
            RationalVector raw;
            for (const auto& v : instance.type(i, a).values) {
                raw.push_back(v * instance.scale());
            }
            t["values"] = rational_strings(raw);
            if (instance.is_independent()) {
                t["prob"] = to_string(instance.type_probability(i, a));
            }
            if (!instance.type(i, a).label.empty()) {
                t["label"] = instance.type(i, a).label;
            }
            space.push_back(t);
        }
        types.push_back(space);
    }
    doc["types"] = types;
    if (!instance.is_independent()) {
        nlohmann::json joint = nlohmann::json::array();
        for (const auto& entry : instance.joint()) {
            joint.push_back({{"profile", entry.profile}, {"prob", to_string(entry.probability)}});
        }
        doc["joint"] = joint;
    }
    doc["feasibility"] = to_json(instance.feasibility());
    if (instance.budgets()) {
        RationalVector raw;
        for (const auto& b : *instance.budgets()) {
            raw.push_back(b * instance.scale());
        }
        doc["budgets"] = rational_strings(raw);
    }
    return doc;
}

}  // namespace revmech
