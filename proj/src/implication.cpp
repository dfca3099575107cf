#include "vne/implication.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace vne {

namespace {

constexpr const char* kCheckpointFormat = "vne-implication";
constexpr int kCheckpointVersion = 1;

void require_finite(std::span<const double> v, const char* layer) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericFault(layer);
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// y[o][t] = b[o] + sum_c sum_k w[o][c][k] x[c][t + k - pad], zero padded.
void conv1d(std::span<const double> x, std::size_t in_ch, std::span<const double> w,
            std::span<const double> b, std::size_t out_ch, std::size_t len, std::size_t kernel,
            std::span<double> y) {
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    for (std::size_t o = 0; o < out_ch; ++o) {
        for (std::size_t t = 0; t < len; ++t) {
            double acc = b[o];
            for (std::size_t c = 0; c < in_ch; ++c) {
                const double* wk = &w[(o * in_ch + c) * kernel];
                const double* xc = &x[c * len];
                for (std::size_t k = 0; k < kernel; ++k) {
                    const auto s = static_cast<std::ptrdiff_t>(t + k) - pad;
                    if (s >= 0 && s < static_cast<std::ptrdiff_t>(len)) acc += wk[k] * xc[s];
                }
            }
            y[o * len + t] = acc;
        }
    }
}

// Accumulates dW, db and (optionally) dx for conv1d given dy.
void conv1d_backward(std::span<const double> x, std::size_t in_ch, std::span<const double> w,
                     std::size_t out_ch, std::size_t len, std::size_t kernel,
                     std::span<const double> dy, std::span<double> dw, std::span<double> db,
                     std::span<double> dx) {
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    for (std::size_t o = 0; o < out_ch; ++o) {
        for (std::size_t t = 0; t < len; ++t) {
            const double g = dy[o * len + t];
            if (g == 0.0) continue;
            db[o] += g;
            for (std::size_t c = 0; c < in_ch; ++c) {
                const std::size_t wbase = (o * in_ch + c) * kernel;
                for (std::size_t k = 0; k < kernel; ++k) {
                    const auto s = static_cast<std::ptrdiff_t>(t + k) - pad;
                    if (s < 0 || s >= static_cast<std::ptrdiff_t>(len)) continue;
                    dw[wbase + k] += g * x[c * len + s];
                    if (!dx.empty()) dx[c * len + s] += g * w[wbase + k];
                }
            }
        }
    }
}

std::span<const double> block(std::span<const double> p, std::size_t off, std::size_t n) {
    return p.subspan(off, n);
}

std::span<double> block(std::span<double> p, std::size_t off, std::size_t n) {
    return p.subspan(off, n);
}

}  // namespace

void ImplicationShape::validate() const {
    if (signal_length == 0 || conv1_channels == 0 || conv2_channels == 0 || hidden == 0) {
        throw std::invalid_argument("implication network dimensions must be positive");
    }
    if (kernel == 0 || kernel % 2 == 0) {
        throw std::invalid_argument("convolution kernel width must be odd");
    }
    if (outputs != kLabelCount) {
        throw std::invalid_argument(fmt::format("output width must be {}", kLabelCount));
    }
}

NumericFault::NumericFault(std::string layer)
    : std::runtime_error("non-finite value in layer " + layer), layer_(std::move(layer)) {}

ParamLayout ParamLayout::of(const ImplicationShape& s) {
    ParamLayout l{};
    std::size_t at = 0;
    auto take = [&at](std::size_t n) {
        const std::size_t off = at;
        at += n;
        return off;
    };
    l.w1 = take(s.conv1_channels * 1 * s.kernel);
    l.b1 = take(s.conv1_channels);
    l.w2 = take(s.conv2_channels * s.conv1_channels * s.kernel);
    l.b2 = take(s.conv2_channels);
    l.w3 = take(s.hidden * s.flat());
    l.b3 = take(s.hidden);
    l.w4 = take(s.outputs * s.hidden);
    l.b4 = take(s.outputs);
    l.total = at;
    return l;
}

ImplicationNetwork::ImplicationNetwork(ImplicationShape shape)
    : shape_(shape), layout_(ParamLayout::of(shape)), params_(layout_.total, 0.0) {
    shape_.validate();
}

double truncated_normal_sigma(std::size_t fan_in) {
    return std::sqrt(2.0 / static_cast<double>(fan_in));
}

std::vector<double> sample_truncated_normal(std::size_t count, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> out(count);
    for (double& x : out) {
        do {
            x = normal(rng);
        } while (std::abs(x) > 3.0 * sigma);
    }
    return out;
}

ImplicationNetwork ImplicationNetwork::init_weights(const ImplicationShape& shape,
                                                    std::uint64_t seed) {
    ImplicationNetwork net(shape);
    const auto& l = net.layout_;
    struct Block {
        std::size_t offset, count, fan_in;
    };
    const Block weights[] = {
        {l.w1, l.b1 - l.w1, shape.kernel},
        {l.w2, l.b2 - l.w2, shape.conv1_channels * shape.kernel},
        {l.w3, l.b3 - l.w3, shape.flat()},
        {l.w4, l.b4 - l.w4, shape.hidden},
    };
    std::uint64_t stream = seed * 0x9E3779B97F4A7C15ULL;
    for (const auto& b : weights) {
        const auto values =
            sample_truncated_normal(b.count, truncated_normal_sigma(b.fan_in), ++stream);
        std::copy(values.begin(), values.end(), net.params_.begin() + b.offset);
    }
    return net;
}

std::vector<double> forward(const ImplicationNetwork& net, std::span<const double> row,
                            NodeTape* tape) {
    const auto& s = net.shape();
    const auto& l = net.layout();
    const auto p = net.params();
    if (row.size() != s.signal_length) {
        throw std::invalid_argument(
            fmt::format("forward: expected {} inputs, got {}", s.signal_length, row.size()));
    }
    require_finite(row, "input");
    const std::size_t len = s.signal_length;

    std::vector<double> z1(s.conv1_channels * len);
    conv1d(row, 1, block(p, l.w1, l.b1 - l.w1), block(p, l.b1, s.conv1_channels),
           s.conv1_channels, len, s.kernel, z1);
    require_finite(z1, "conv1");
    std::vector<double> a1(z1.size());
    std::transform(z1.begin(), z1.end(), a1.begin(), [](double z) { return std::max(z, 0.0); });

    std::vector<double> z2(s.conv2_channels * len);
    conv1d(a1, s.conv1_channels, block(p, l.w2, l.b2 - l.w2), block(p, l.b2, s.conv2_channels),
           s.conv2_channels, len, s.kernel, z2);
    require_finite(z2, "conv2");
    std::vector<double> a2(z2.size());
    std::transform(z2.begin(), z2.end(), a2.begin(), [](double z) { return std::max(z, 0.0); });

    std::vector<double> z3(s.hidden);
    for (std::size_t h = 0; h < s.hidden; ++h) {
        const double* w = &p[l.w3 + h * s.flat()];
        double acc = p[l.b3 + h];
        for (std::size_t j = 0; j < s.flat(); ++j) acc += w[j] * a2[j];
        z3[h] = acc;
    }
    require_finite(z3, "fc1");

    std::vector<double> out(s.outputs);
    for (std::size_t o = 0; o < s.outputs; ++o) {
        const double* w = &p[l.w4 + o * s.hidden];
        double acc = p[l.b4 + o];
        for (std::size_t h = 0; h < s.hidden; ++h) acc += w[h] * std::max(z3[h], 0.0);
        out[o] = sigmoid(acc);
    }
    require_finite(out, "fc2");

    if (tape) {
        tape->input.assign(row.begin(), row.end());
        tape->z1 = std::move(z1);
        tape->z2 = std::move(z2);
        tape->z3 = std::move(z3);
        tape->out = out;
    }
    return out;
}

ForwardTape forward(const ImplicationNetwork& net, const FuzzifiedInput& input) {
    ForwardTape tape;
    tape.shape = net.shape();
    tape.nodes.resize(input.rows());
    for (std::size_t i = 0; i < input.rows(); ++i) {
        forward(net, input.memberships[i], &tape.nodes[i]);
    }
    return tape;
}

Gradients backward(const ImplicationNetwork& net, const ForwardTape& tape,
                   std::span<const double> d_outputs) {
    const auto& s = net.shape();
    const auto& l = net.layout();
    const auto p = net.params();
    if (!(tape.shape == s)) throw std::invalid_argument("backward: tape recorded by another shape");
    if (d_outputs.size() != tape.nodes.size() * s.outputs) {
        throw std::invalid_argument("backward: output gradient does not match tape");
    }
    const std::size_t len = s.signal_length;
    Gradients g = Gradients::zeros(net);
    std::span<double> gs(g.values);

    std::vector<double> dz3(s.hidden), da2(s.flat()), dz2(s.flat());
    std::vector<double> da1(s.conv1_channels * len), dz1(s.conv1_channels * len);
    std::vector<double> a1(s.conv1_channels * len), a2(s.flat());

    for (std::size_t n = 0; n < tape.nodes.size(); ++n) {
        const NodeTape& t = tape.nodes[n];
        if (t.out.size() != s.outputs || t.z2.size() != s.flat()) {
            throw std::invalid_argument("backward: forward pass was not recorded");
        }
        std::transform(t.z1.begin(), t.z1.end(), a1.begin(), [](double z) { return std::max(z, 0.0); });
        std::transform(t.z2.begin(), t.z2.end(), a2.begin(), [](double z) { return std::max(z, 0.0); });

        // fc2 + sigmoid
        std::fill(dz3.begin(), dz3.end(), 0.0);
        for (std::size_t o = 0; o < s.outputs; ++o) {
            const double F = t.out[o];
            const double dz4 = d_outputs[n * s.outputs + o] * F * (1.0 - F);
            if (dz4 == 0.0) continue;
            gs[l.b4 + o] += dz4;
            for (std::size_t h = 0; h < s.hidden; ++h) {
                gs[l.w4 + o * s.hidden + h] += dz4 * std::max(t.z3[h], 0.0);
                dz3[h] += p[l.w4 + o * s.hidden + h] * dz4;
            }
        }
        // fc1 + relu
        std::fill(da2.begin(), da2.end(), 0.0);
        for (std::size_t h = 0; h < s.hidden; ++h) {
            const double d = t.z3[h] > 0.0 ? dz3[h] : 0.0;
            if (d == 0.0) continue;
            gs[l.b3 + h] += d;
            double* gw = &gs[l.w3 + h * s.flat()];
            const double* w = &p[l.w3 + h * s.flat()];
            for (std::size_t j = 0; j < s.flat(); ++j) {
                gw[j] += d * a2[j];
                da2[j] += w[j] * d;
            }
        }
        for (std::size_t j = 0; j < s.flat(); ++j) dz2[j] = t.z2[j] > 0.0 ? da2[j] : 0.0;

        // conv2
        std::fill(da1.begin(), da1.end(), 0.0);
        conv1d_backward(a1, s.conv1_channels, block(p, l.w2, l.b2 - l.w2), s.conv2_channels, len,
                        s.kernel, dz2, block(gs, l.w2, l.b2 - l.w2),
                        block(gs, l.b2, s.conv2_channels), da1);
        for (std::size_t j = 0; j < da1.size(); ++j) dz1[j] = t.z1[j] > 0.0 ? da1[j] : 0.0;

        // conv1 (input gradient not needed)
        conv1d_backward(t.input, 1, block(p, l.w1, l.b1 - l.w1), s.conv1_channels, len, s.kernel,
                        dz1, block(gs, l.w1, l.b1 - l.w1), block(gs, l.b1, s.conv1_channels), {});
    }
    return g;
}

void sgd_step(ImplicationNetwork& net, const Gradients& grads, double learning_rate) {
    auto p = net.params();
    if (grads.values.size() != p.size()) throw std::invalid_argument("gradient size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * grads.values[i];
}

double loss(std::span<const double> p, std::span<const double> target) {
    if (p.size() != target.size()) throw std::invalid_argument("loss: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (target[i] == 0.0) continue;
        total -= target[i] * std::log(std::max(p[i], kLogEpsilon));
    }
    return total;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
}

EpisodeEvaluation evaluate_episode(const ImplicationNetwork& net, const FuzzifiedInput& input,
                                   const ScoringConfig& scoring) {
    EpisodeEvaluation e;
    e.tape = forward(net, input);
    e.scores.resize(e.tape.nodes.size());
    for (std::size_t i = 0; i < e.scores.size(); ++i) {
        e.scores[i] = defuzzify(e.tape.nodes[i].out, scoring.scale);
    }
    e.probabilities = embedding_probabilities(e.scores, scoring.normalization);
    return e;
}

std::vector<double> loss_output_gradient(const EpisodeEvaluation& eval,
                                         std::span<const double> target,
                                         const ScoringConfig& scoring) {
    const std::size_t n = eval.scores.size();
    if (target.size() != n) throw std::invalid_argument("target size mismatch");
    const auto& p = eval.probabilities;

    std::vector<double> dp(n);
    double weighted = 0.0;  // sum_i dL/dp_i * p_i
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = p[i] > kLogEpsilon ? -target[i] / p[i] : 0.0;
        weighted += dp[i] * p[i];
    }

    std::vector<double> d_scores(n);
    if (scoring.normalization == Normalization::sum) {
        double total = 0.0;
        for (double o : eval.scores) total += o;
        for (std::size_t k = 0; k < n; ++k) d_scores[k] = (dp[k] - weighted) / total;
    } else {
        for (std::size_t k = 0; k < n; ++k) d_scores[k] = p[k] * (dp[k] - weighted);
    }

    const std::size_t q = kLabelCount;
    std::vector<double> d_out(n * q);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& F = eval.tape.nodes[k].out;
        double mass = 0.0;
        for (double f : F) mass += f;
        for (std::size_t l = 0; l < q; ++l) {
            d_out[k * q + l] = d_scores[k] * (scoring.scale.values[l] - eval.scores[k]) / mass;
        }
    }
    return d_out;
}

LossAndGradient loss_and_gradient(const ImplicationNetwork& net, const FuzzifiedInput& input,
                                  std::span<const double> target, const ScoringConfig& scoring) {
    const auto eval = evaluate_episode(net, input, scoring);
    const auto d_out = loss_output_gradient(eval, target, scoring);
    return {loss(eval.probabilities, target), backward(net, eval.tape, d_out)};
}

double gradient_check(const ImplicationNetwork& net, const FuzzifiedInput& input,
                      std::span<const double> target, const ScoringConfig& scoring, double epsilon,
                      std::size_t samples, std::uint64_t seed) {
    const auto analytic = loss_and_gradient(net, input, target, scoring).grads.values;
    ImplicationNetwork probe = net;
    auto params = probe.params();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
    auto loss_at = [&] {
        return loss(evaluate_episode(probe, input, scoring).probabilities, target);
    };

    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = pick(rng);
        const double saved = params[i];
        params[i] = saved + epsilon;
        const double up = loss_at();
        params[i] = saved - epsilon;
        const double down = loss_at();
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

nlohmann::json to_json(const ImplicationNetwork& net) {
    const auto& s = net.shape();
    return {
        {"format", kCheckpointFormat},
        {"version", kCheckpointVersion},
        {"shape",
         {{"signal_length", s.signal_length},
          {"conv1_channels", s.conv1_channels},
          {"conv2_channels", s.conv2_channels},
          {"kernel", s.kernel},
          {"hidden", s.hidden},
          {"outputs", s.outputs}}},
        {"params", std::vector<double>(net.params().begin(), net.params().end())},
    };
}

ImplicationNetwork network_from_json(const nlohmann::json& j, const ImplicationShape* expected) {
    if (j.value("format", "") != kCheckpointFormat) {
        throw std::runtime_error("not an implication network checkpoint");
    }
    if (j.value("version", 0) != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version");
    }
    const auto& js = j.at("shape");
    ImplicationShape s;
    s.signal_length = js.at("signal_length").get<std::size_t>();
    s.conv1_channels = js.at("conv1_channels").get<std::size_t>();
    s.conv2_channels = js.at("conv2_channels").get<std::size_t>();
    s.kernel = js.at("kernel").get<std::size_t>();
    s.hidden = js.at("hidden").get<std::size_t>();
    s.outputs = js.at("outputs").get<std::size_t>();
    if (expected && !(*expected == s)) throw std::runtime_error("checkpoint shape mismatch");

    ImplicationNetwork net(s);
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != net.params().size()) {
        throw std::runtime_error(fmt::format("checkpoint holds {} parameters, shape needs {}",
                                             params.size(), net.params().size()));
    }
    std::copy(params.begin(), params.end(), net.params().begin());
    return net;
}

}  // namespace vne
