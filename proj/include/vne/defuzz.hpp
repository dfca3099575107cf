#pragma once

#include <array>
#include <span>
#include <vector>

#include "vne/labels.hpp"

namespace vne {

/// Crisp representative value for each consequent label, VL..VH.
struct ConsequentScale {
    std::array<double, kLabelCount> values{0.1, 0.3, 0.5, 0.7, 0.9};

    /// Throws std::invalid_argument unless strictly increasing.
    void validate() const;
};

/// How per-node scores become embedding probabilities.
enum class Normalization {
    sum,          // p(i) = o(i) / sum_j o(j)
    exponential,  // softmax over o, kept for ablation
};

/// Center of gravity: sum_l v_l F(l) / sum_l F(l).
double defuzzify(std::span<const double> memberships, const ConsequentScale& scale);

/// Throws std::invalid_argument on an empty vector or (sum mode) a
/// non-positive score.
std::vector<double> embedding_probabilities(std::span<const double> scores,
                                            Normalization mode = Normalization::sum);

}  // namespace vne
