#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "vne/defuzz.hpp"
#include "vne/implication.hpp"

using namespace vne;
using vne::testing::random_input;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> one_hot(std::size_t n, std::size_t at) {
    std::vector<double> t(n, 0.0);
    t[at] = 1.0;
    return t;
}

}  // namespace

TEST_CASE("consequent defuzzification") {
    const ConsequentScale scale;
    CHECK(defuzzify(std::vector<double>{0, 0, 0, 0, 1}, scale) == doctest::Approx(0.9));
    CHECK(defuzzify(std::vector<double>{0.4, 0.4, 0.4, 0.4, 0.4}, scale) == doctest::Approx(0.5));
    // (0.01 + 0.06 + 0.15 + 0.14 + 0.09) / 0.9
    CHECK(defuzzify(std::vector<double>{0.1, 0.2, 0.3, 0.2, 0.1}, scale) == doctest::Approx(0.5));
    CHECK(defuzzify(std::vector<double>{0.9, 0.1, 0.0, 0.0, 0.0}, scale) ==
          doctest::Approx((0.09 + 0.03) / 1.0));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> f(5);
        for (auto& x : f) x = u(rng);
        const double o = defuzzify(f, scale);
        CHECK((o >= 0.1 && o <= 0.9));
    }

    ConsequentScale bad;
    bad.values = {0.1, 0.3, 0.3, 0.7, 0.9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sum normalization") {
    auto p = embedding_probabilities(std::vector<double>(100, 0.37));
    for (double x : p) CHECK(x == doctest::Approx(0.01));
    auto q = embedding_probabilities(std::vector<double>{1, 3});
    CHECK(q[0] == doctest::Approx(0.25));
    CHECK(q[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(embedding_probabilities(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(embedding_probabilities(std::vector<double>{1, 0}), std::invalid_argument);
}

TEST_CASE("normalization is scale invariant and keeps the ranking") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> o(1 + rng() % 60);
        for (auto& x : o) x = u(rng);
        auto p = embedding_probabilities(o);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        std::vector<double> scaled(o);
        for (auto& x : scaled) x *= 7.5;
        auto ps = embedding_probabilities(scaled);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(ps[i] == doctest::Approx(p[i]).epsilon(1e-12));

        auto e = embedding_probabilities(o, Normalization::exponential);
        CHECK(std::accumulate(e.begin(), e.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < o.size(); ++i) CHECK((o[i] > o[0]) == (e[i] > e[0]));
    }
}

TEST_CASE("initializer statistics") {
    CHECK(truncated_normal_sigma(15) == doctest::Approx(0.365).epsilon(1e-3));

    const double sigma = truncated_normal_sigma(15);
    const auto s = sample_truncated_normal(100000, sigma, 5);
    double mean = 0.0;
    for (double x : s) {
        CHECK(std::abs(x) <= 3.0 * sigma);
        mean += x;
    }
    mean /= double(s.size());
    double var = 0.0;
    for (double x : s) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / double(s.size()));

    // Standard deviation of a unit normal cut at +-3: 1 - 2a phi(a) / (2 Phi(a) - 1).
    const double a = 3.0;
    const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    const double mass = std::erf(a / std::sqrt(2.0));
    const double exact = std::sqrt(1.0 - 2.0 * a * phi / mass);
    CHECK(exact == doctest::Approx(0.98658).epsilon(1e-4));
    CHECK(sd == doctest::Approx(sigma * exact).epsilon(0.01));
    CHECK(sd == doctest::Approx(sigma * 0.9566).epsilon(0.08));
    CHECK(std::abs(mean) < 0.01 * sigma);
}

TEST_CASE("initialization is deterministic and zeroes biases") {
    const ImplicationShape shape;
    auto a = ImplicationNetwork::init_weights(shape, 9);
    auto b = ImplicationNetwork::init_weights(shape, 9);
    auto c = ImplicationNetwork::init_weights(shape, 10);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    const auto& l = a.layout();
    CHECK(l.total == 8 * 3 + 8 + 16 * 8 * 3 + 16 + 64 * 240 + 64 + 5 * 64 + 5);
    for (std::size_t i = l.b1; i < l.w2; ++i) CHECK(a.params()[i] == 0.0);
    for (std::size_t i = l.b4; i < l.total; ++i) CHECK(a.params()[i] == 0.0);
    for (std::size_t i = l.w3; i < l.b3; ++i) {
        CHECK(std::abs(a.params()[i]) <= 3.0 * truncated_normal_sigma(240));
    }
}

TEST_CASE("shape validation") {
    ImplicationShape s;
    s.kernel = 4;
    CHECK_THROWS_AS(ImplicationNetwork{s}, std::invalid_argument);
    s = {};
    s.outputs = 4;
    CHECK_THROWS_AS(ImplicationNetwork{s}, std::invalid_argument);
}

TEST_CASE("a dead network outputs one half everywhere") {
    ImplicationNetwork net;
    auto in = random_input(4, 1);
    for (const auto& row : in.memberships) {
        auto out = forward(net, row);
        REQUIRE(out.size() == 5);
        for (double f : out) CHECK(f == 0.5);
    }
}

TEST_CASE("hand-computed forward pass") {
    ImplicationShape s;
    s.signal_length = 3;
    s.conv1_channels = 1;
    s.conv2_channels = 1;
    s.kernel = 3;
    s.hidden = 2;
    ImplicationNetwork net(s);
    const auto& l = net.layout();
    REQUIRE(l.total == 31);
    auto p = net.params();
    auto set = [&](std::size_t off, std::initializer_list<double> v) {
        std::copy(v.begin(), v.end(), p.begin() + off);
    };
    set(l.w1, {0.5, 1.0, 0.0});  // z1[t] = 0.5 x[t-1] + x[t]
    set(l.w2, {0.0, 1.0, -1.0});  // z2[t] = a1[t] - a1[t+1] - 1
    set(l.b2, {-1.0});
    set(l.w3, {1, 1, 1, 0, 0, -1});
    set(l.b3, {0.0, 0.5});
    set(l.w4, {1, 5, 0, 0, -1, 0, 0.5, 0, 2, 0});
    set(l.b4, {0, 0, 1, 0, -6});

    // x = (1, 2, 3): z1 = (1, 2.5, 4); z2 = (-2.5, -2.5, 3); a2 = (0, 0, 3);
    // z3 = (3, -2.5); logits = (3, 0, -2, 1.5, 0).
    NodeTape tape;
    auto out = forward(net, std::vector<double>{1, 2, 3}, &tape);
    CHECK(tape.z1 == std::vector<double>{1, 2.5, 4});
    CHECK(tape.z2 == std::vector<double>{-2.5, -2.5, 3});
    CHECK(tape.z3 == std::vector<double>{3, -2.5});
    const double expect[] = {sigmoid(3), 0.5, sigmoid(-2), sigmoid(1.5), 0.5};
    for (int i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("forward is deterministic and bounded") {
    auto net = ImplicationNetwork::init_weights({}, 3);
    auto in = random_input(20, 3);
    for (const auto& row : in.memberships) {
        auto a = forward(net, row);
        auto b = forward(net, row);
        CHECK(a == b);
        for (double f : a) CHECK((f > 0.0 && f < 1.0));
    }
}

TEST_CASE("non-finite values are reported with their layer") {
    auto net = ImplicationNetwork::init_weights({}, 3);
    std::vector<double> row(15, 0.5);
    row[3] = std::numeric_limits<double>::quiet_NaN();
    try {
        forward(net, row);
        FAIL("expected a fault");
    } catch (const NumericFault& e) {
        CHECK(e.layer() == "input");
    }
    row[3] = 0.5;
    net.params()[net.layout().b1] = std::numeric_limits<double>::infinity();
    try {
        forward(net, row);
        FAIL("expected a fault");
    } catch (const NumericFault& e) {
        CHECK(e.layer() == "conv1");
    }
    CHECK_THROWS_AS(forward(net, std::vector<double>(14, 0.5)), std::invalid_argument);
}

TEST_CASE("cross entropy") {
    CHECK(loss(std::vector<double>(4, 0.25), one_hot(4, 2)) == doctest::Approx(1.3863).epsilon(1e-4));
    const std::vector<double> t{0.2, 0.3, 0.5};
    CHECK(loss(t, t) == doctest::Approx(-(0.2 * std::log(0.2) + 0.3 * std::log(0.3) + 0.5 * std::log(0.5))));
    CHECK(loss(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(-std::log(kLogEpsilon)));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(12), tg(12);
        for (auto& x : p) x = u(rng);
        for (auto& x : tg) x = u(rng);
        const double ps = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& x : p) x /= ps;
        double naive = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) naive += -tg[i] * std::log(p[i]);
        CHECK(loss(p, tg) == doctest::Approx(naive).epsilon(1e-12));
    }
}

TEST_CASE("sgd arithmetic") {
    ImplicationShape s;
    s.signal_length = 1;
    s.conv1_channels = 1;
    s.conv2_channels = 1;
    s.kernel = 1;
    s.hidden = 1;
    ImplicationNetwork net(s);
    net.params()[0] = 1.0;
    auto g = Gradients::zeros(net);
    sgd_step(net, g, 0.01);
    CHECK(net.params()[0] == 1.0);
    g.values[0] = 2.0;
    sgd_step(net, g, 0.01);
    CHECK(net.params()[0] == doctest::Approx(0.98));

    auto a = ImplicationNetwork::init_weights({}, 4);
    auto b = a;
    auto in = random_input(6, 4);
    auto grads = loss_and_gradient(a, in, one_hot(6, 1), {}).grads;
    sgd_step(a, grads, 0.01);
    sgd_step(a, grads, 0.01);
    sgd_step(b, grads, 0.02);
    for (std::size_t i = 0; i < a.params().size(); ++i) {
        CHECK(a.params()[i] == doctest::Approx(b.params()[i]).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match finite differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto net = ImplicationNetwork::init_weights({}, seed);
        auto in = random_input(10, seed + 100);
        std::vector<double> target(10, 0.0);
        target[seed % 10] = 0.5;
        target[(seed + 3) % 10] = 0.5;
        CHECK(gradient_check(net, in, target, {}, 1e-5, 50, seed) < 1e-3);
        ScoringConfig exp;
        exp.normalization = Normalization::exponential;
        CHECK(gradient_check(net, in, target, exp, 1e-5, 50, seed) < 1e-3);
    }
}

TEST_CASE("scoring against its own scores gives no gradient under sum normalization") {
    // With target = o held constant, dL/do_k = -o_k / o_k + sum(o) / sum(o) = 0.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto net = ImplicationNetwork::init_weights({}, seed);
        auto in = random_input(8, seed);
        const ScoringConfig scoring;
        auto eval = evaluate_episode(net, in, scoring);
        auto d = loss_output_gradient(eval, eval.scores, scoring);
        for (double x : d) CHECK(std::abs(x) < 1e-12);
    }
}

TEST_CASE("a step toward the chosen placement lowers its loss") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto net = ImplicationNetwork::init_weights({}, seed);
        auto in = random_input(10, seed * 7);
        std::vector<double> target(10, 0.0);
        target[1] = target[4] = target[seed % 10] = 1.0;
        const double mass = std::accumulate(target.begin(), target.end(), 0.0);
        for (auto& t : target) t /= mass;
        const ScoringConfig scoring;
        auto before = loss_and_gradient(net, in, target, scoring);
        sgd_step(net, before.grads, 0.01 / 10.0);
        const double after = loss(evaluate_episode(net, in, scoring).probabilities, target);
        CHECK(after < before.loss);
    }
}

TEST_CASE("backward rejects a mismatched tape") {
    auto net = ImplicationNetwork::init_weights({}, 1);
    auto eval = evaluate_episode(net, random_input(3, 1), {});
    CHECK_THROWS_AS(backward(net, eval.tape, std::vector<double>(14, 0.0)), std::invalid_argument);
    ForwardTape blank;
    blank.shape = net.shape();
    blank.nodes.resize(1);
    CHECK_THROWS_AS(backward(net, blank, std::vector<double>(5, 1.0)), std::invalid_argument);
}

TEST_CASE("checkpoint JSON round-trip") {
    auto net = ImplicationNetwork::init_weights({}, 12);
    auto j = nlohmann::json::parse(to_json(net).dump());
    CHECK(network_from_json(j) == net);
    const ImplicationShape shape;
    CHECK(network_from_json(j, &shape) == net);

    ImplicationShape other;
    other.hidden = 32;
    CHECK_THROWS(network_from_json(j, &other));
    j["params"].erase(0);
    CHECK_THROWS(network_from_json(j));
    CHECK_THROWS(network_from_json(nlohmann::json{{"format", "something-else"}}));
}
