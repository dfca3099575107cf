#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vne/fuzzy.hpp"
#include "vne/labels.hpp"

namespace vne {

/// Mamdani rule: if x1 is F1 and x2 is F2 and x3 is F3 then ned is C : w.
struct FuzzyRule {
    LabelTriple antecedent{};
    Label consequent = Label::M;
    double weight = 0.0;
    std::size_t support = 1;

    bool operator==(const FuzzyRule&) const = default;
};

/// Label of p[j] after min-max scaling p across all nodes, cut at
/// 0.2 / 0.4 / 0.6 / 0.8. A constant vector scales to 0.5 (M).
Label consequent_label(std::span<const double> p, std::size_t j);

FuzzyRule derive_rule(const LabelTriple& antecedent, std::span<const double> p, std::size_t j);

/// One rule per node of an episode.
std::vector<FuzzyRule> derive_rules(const FuzzifiedInput& input, std::span<const double> p);

/// "If x1 is very high (VH), and x2 is ..., Then ned is high (H): 0.8384"
std::string render_rule(const FuzzyRule& rule);

class RuleBase {
public:
    using Key = std::tuple<Label, Label, Label, Label>;

    /// Merges into an existing (antecedent, consequent) rule as a running mean
    /// of the weight, or appends a new rule.
    void update(const FuzzyRule& rule);

    /// Inserts a rule verbatim (weight and support kept); throws on a
    /// duplicate key. Used when loading a saved rule base.
    void restore(const FuzzyRule& rule);

    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }
    std::span<const FuzzyRule> rules() const { return rules_; }
    const FuzzyRule* find(const LabelTriple& antecedent, Label consequent) const;

    bool operator==(const RuleBase& o) const { return rules_ == o.rules_; }

private:
    static Key key_of(const FuzzyRule& r);

    std::vector<FuzzyRule> rules_;  // creation order
    std::map<Key, std::size_t> index_;
};

inline constexpr std::size_t kMaxRules = kLabelCount * kLabelCount * kLabelCount * kLabelCount;

/// Numbered Table-style listing, one rule per line.
std::string render_table(const RuleBase& rb, std::size_t limit = 0);

nlohmann::json to_json(const RuleBase& rb);
RuleBase rulebase_from_json(const nlohmann::json& j);

/// Pairs of rules that share antecedent dims 2 and 3 where dim 1 is VH in one
/// and L in the other; `ordered` counts pairs where the VH rule's weight is
/// not lower.
struct MonotonicityReport {
    std::size_t pairs = 0;
    std::size_t ordered = 0;

    double fraction() const { return pairs ? double(ordered) / double(pairs) : 0.0; }
};

MonotonicityReport resource_monotonicity(const RuleBase& rb);

}  // namespace vne
