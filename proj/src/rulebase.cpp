#include "vne/rulebase.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace vne {

Label consequent_label(std::span<const double> p, std::size_t j) {
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    const double span = *hi - *lo;
    const double scaled = span > 0.0 ? (p[j] - *lo) / span : 0.5;
    if (scaled < 0.2) return Label::VL;
    if (scaled < 0.4) return Label::L;
    if (scaled < 0.6) return Label::M;
    if (scaled < 0.8) return Label::H;
    return Label::VH;
}

FuzzyRule derive_rule(const LabelTriple& antecedent, std::span<const double> p, std::size_t j) {
    return {antecedent, consequent_label(p, j), p[j], 1};
}

std::vector<FuzzyRule> derive_rules(const FuzzifiedInput& input, std::span<const double> p) {
    if (p.size() != input.rows()) throw std::invalid_argument("derive_rules: size mismatch");
    std::vector<FuzzyRule> out;
    out.reserve(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) out.push_back(derive_rule(input.labels[j], p, j));
    return out;
}

std::string render_rule(const FuzzyRule& rule) {
    auto term = [](Label l) { return fmt::format("{} ({})", long_name(l), short_name(l)); };
    return fmt::format("If x1 is {}, and x2 is {}, and x3 is {}, Then ned is {}: {:.4f}",
                       term(rule.antecedent[0]), term(rule.antecedent[1]),
                       term(rule.antecedent[2]), term(rule.consequent), rule.weight);
}

RuleBase::Key RuleBase::key_of(const FuzzyRule& r) {
    return {r.antecedent[0], r.antecedent[1], r.antecedent[2], r.consequent};
}

void RuleBase::update(const FuzzyRule& rule) {
    const auto key = key_of(rule);
    if (auto it = index_.find(key); it != index_.end()) {
        auto& r = rules_[it->second];
        const double n = static_cast<double>(r.support);
        r.weight = (r.weight * n + rule.weight) / (n + 1.0);
        ++r.support;
        return;
    }
    index_.emplace(key, rules_.size());
    rules_.push_back(rule);
    rules_.back().support = 1;
}

void RuleBase::restore(const FuzzyRule& rule) {
    if (!index_.emplace(key_of(rule), rules_.size()).second) {
        throw std::runtime_error("duplicate rule key");
    }
    rules_.push_back(rule);
}

const FuzzyRule* RuleBase::find(const LabelTriple& antecedent, Label consequent) const {
    auto it = index_.find({antecedent[0], antecedent[1], antecedent[2], consequent});
    return it == index_.end() ? nullptr : &rules_[it->second];
}

std::string render_table(const RuleBase& rb, std::size_t limit) {
    std::string out;
    const std::size_t n = limit ? std::min(limit, rb.size()) : rb.size();
    for (std::size_t i = 0; i < n; ++i) {
        out += fmt::format("R{}: {}\n", i + 1, render_rule(rb.rules()[i]));
    }
    return out;
}

nlohmann::json to_json(const RuleBase& rb) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rb.rules()) {
        arr.push_back({{"antecedent",
                        {short_name(r.antecedent[0]), short_name(r.antecedent[1]),
                         short_name(r.antecedent[2])}},
                       {"consequent", short_name(r.consequent)},
                       {"weight", r.weight},
                       {"support", r.support}});
    }
    return arr;
}

RuleBase rulebase_from_json(const nlohmann::json& j) {
    auto label = [](const nlohmann::json& v) {
        const auto l = parse_label(v.get<std::string>());
        if (!l) throw std::runtime_error("unknown linguistic label " + v.dump());
        return *l;
    };
    RuleBase rb;
    for (const auto& item : j) {
        const auto& ant = item.at("antecedent");
        if (ant.size() != kFeatureCount) throw std::runtime_error("antecedent needs 3 labels");
        rb.restore({{label(ant[0]), label(ant[1]), label(ant[2])},
                    label(item.at("consequent")),
                    item.at("weight").get<double>(),
                    item.at("support").get<std::size_t>()});
    }
    return rb;
}

MonotonicityReport resource_monotonicity(const RuleBase& rb) {
    MonotonicityReport report;
    for (const auto& hi : rb.rules()) {
        if (hi.antecedent[0] != Label::VH) continue;
        for (const auto& lo : rb.rules()) {
            if (lo.antecedent[0] != Label::L || lo.antecedent[1] != hi.antecedent[1] ||
                lo.antecedent[2] != hi.antecedent[2]) {
                continue;
            }
            ++report.pairs;
            if (hi.weight >= lo.weight) ++report.ordered;
        }
    }
    return report;
}

}  // namespace vne
