#include "vne/defuzz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vne {

void ConsequentScale::validate() const {
    for (std::size_t l = 1; l < values.size(); ++l) {
        if (!(values[l] > values[l - 1])) {
            throw std::invalid_argument("consequent scale must be strictly increasing");
        }
    }
}

double defuzzify(std::span<const double> memberships, const ConsequentScale& scale) {
    if (memberships.size() != kLabelCount) {
        throw std::invalid_argument("defuzzify expects one membership per consequent label");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = 0; l < kLabelCount; ++l) {
        num += scale.values[l] * memberships[l];
        den += memberships[l];
    }
    if (!(den > 0.0)) throw std::invalid_argument("defuzzify: memberships sum to zero");
    return num / den;
}

std::vector<double> embedding_probabilities(std::span<const double> scores, Normalization mode) {
    if (scores.empty()) throw std::invalid_argument("no scores to normalize");
    std::vector<double> p(scores.begin(), scores.end());
    if (mode == Normalization::exponential) {
        const double top = *std::max_element(p.begin(), p.end());
        for (double& x : p) x = std::exp(x - top);
    } else if (std::any_of(p.begin(), p.end(), [](double x) { return !(x > 0.0); })) {
        throw std::invalid_argument("sum normalization needs strictly positive scores");
    }
    double total = 0.0;
    for (double x : p) total += x;
    for (double& x : p) x /= total;
    return p;
}

}  // namespace vne
