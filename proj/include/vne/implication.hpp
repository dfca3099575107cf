#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vne/defuzz.hpp"
#include "vne/fuzzy.hpp"

namespace vne {

/// Layer sizes of the implication network: two same-padded 1-D convolutions
/// over the 15-element membership signal, then two dense layers.
struct ImplicationShape {
    std::size_t signal_length = kFeatureCount * kLabelCount;
    std::size_t conv1_channels = 8;
    std::size_t conv2_channels = 16;
    std::size_t kernel = 3;
    std::size_t hidden = 64;
    std::size_t outputs = kLabelCount;

    std::size_t flat() const { return conv2_channels * signal_length; }
    void validate() const;

    bool operator==(const ImplicationShape&) const = default;
};

/// Raised when a forward pass produces a non-finite value.
class NumericFault : public std::runtime_error {
public:
    explicit NumericFault(std::string layer);
    const std::string& layer() const { return layer_; }

private:
    std::string layer_;
};

/// Offsets of each parameter block inside the flat parameter vector.
struct ParamLayout {
    std::size_t w1, b1, w2, b2, w3, b3, w4, b4, total;

    static ParamLayout of(const ImplicationShape& s);
};

class ImplicationNetwork {
public:
    explicit ImplicationNetwork(ImplicationShape shape = {});

    /// Truncated-normal weights (sigma = sqrt(2 / fan_in), cut at +-3 sigma),
    /// zero biases.
    static ImplicationNetwork init_weights(const ImplicationShape& shape, std::uint64_t seed);

    const ImplicationShape& shape() const { return shape_; }
    const ParamLayout& layout() const { return layout_; }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    bool operator==(const ImplicationNetwork& o) const {
        return shape_ == o.shape_ && params_ == o.params_;
    }

private:
    ImplicationShape shape_;
    ParamLayout layout_;
    std::vector<double> params_;
};

double truncated_normal_sigma(std::size_t fan_in);
std::vector<double> sample_truncated_normal(std::size_t count, double sigma, std::uint64_t seed);

/// Activations of one node's forward pass, kept for backpropagation.
struct NodeTape {
    std::vector<double> input;  // signal_length
    std::vector<double> z1;     // conv1_channels x signal_length, pre-activation
    std::vector<double> z2;     // conv2_channels x signal_length
    std::vector<double> z3;     // hidden
    std::vector<double> out;    // outputs, after sigmoid
};

struct ForwardTape {
    ImplicationShape shape;
    std::vector<NodeTape> nodes;
};

/// Consequent memberships in (0, 1) for one node.
std::vector<double> forward(const ImplicationNetwork& net, std::span<const double> row,
                            NodeTape* tape = nullptr);

/// Shared-weight forward over every node of a fuzzified input.
ForwardTape forward(const ImplicationNetwork& net, const FuzzifiedInput& input);

struct Gradients {
    std::vector<double> values;

    static Gradients zeros(const ImplicationNetwork& net) {
        return {std::vector<double>(net.params().size(), 0.0)};
    }
};

/// Reverse-mode gradients given dL/dF for every node (row-major n x outputs).
/// Throws std::invalid_argument when the tape does not match the network.
Gradients backward(const ImplicationNetwork& net, const ForwardTape& tape,
                   std::span<const double> d_outputs);

/// theta <- theta - lr * grad
void sgd_step(ImplicationNetwork& net, const Gradients& grads, double learning_rate);

inline constexpr double kLogEpsilon = 1e-12;

/// Cross entropy -sum_i t(i) log(max(p(i), eps)).
double loss(std::span<const double> p, std::span<const double> target);

/// Which distribution the cross entropy is taken against.
enum class TargetMode {
    self_scores,  // the node's own defuzzified scores, held constant
    one_hot,      // uniform mass over the substrate nodes of the embedding
};

struct TrainConfig {
    double learning_rate = 0.01;
    int max_iterations = 60;
    std::uint64_t seed = 1;
    TargetMode target_mode = TargetMode::one_hot;

    void validate() const;
};

struct ScoringConfig {
    ConsequentScale scale;
    Normalization normalization = Normalization::sum;
};

struct EpisodeEvaluation {
    ForwardTape tape;
    std::vector<double> scores;         // defuzzified o(i)
    std::vector<double> probabilities;  // p(i)
};

EpisodeEvaluation evaluate_episode(const ImplicationNetwork& net, const FuzzifiedInput& input,
                                   const ScoringConfig& scoring);

/// dL/dF for every node, propagated through normalization and defuzzification.
std::vector<double> loss_output_gradient(const EpisodeEvaluation& eval,
                                         std::span<const double> target,
                                         const ScoringConfig& scoring);

struct LossAndGradient {
    double loss = 0.0;
    Gradients grads;
};

/// Loss for a fixed target distribution and its gradient w.r.t. every parameter.
LossAndGradient loss_and_gradient(const ImplicationNetwork& net, const FuzzifiedInput& input,
                                  std::span<const double> target, const ScoringConfig& scoring);

/// Max relative error between analytic and central-difference gradients over
/// `samples` randomly chosen parameters.
double gradient_check(const ImplicationNetwork& net, const FuzzifiedInput& input,
                      std::span<const double> target, const ScoringConfig& scoring,
                      double epsilon = 1e-5, std::size_t samples = 50, std::uint64_t seed = 0);

nlohmann::json to_json(const ImplicationNetwork& net);
/// Rejects unknown formats and, when `expected` is given, shape mismatches.
ImplicationNetwork network_from_json(const nlohmann::json& j,
                                     const ImplicationShape* expected = nullptr);

}  // namespace vne
