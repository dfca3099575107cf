#pragma once

#include <random>
#include <vector>

#include "vne/fuzzy.hpp"
#include "vne/graph.hpp"

namespace vne::testing {

/// Builds a substrate from explicit node CPU values and (u, v, bw) links.
struct LinkSpec {
    NodeId u, v;
    double bw;
};

inline SubstrateNetwork make_net(const std::vector<double>& cpu, const std::vector<LinkSpec>& links,
                                 const std::vector<Point>& locations = {}) {
    SubstrateNetwork net(1);
    for (std::size_t i = 0; i < cpu.size(); ++i) {
        net.add_node(0, locations.empty() ? Point{double(i), 0.0} : locations[i], cpu[i]);
    }
    for (const auto& l : links) net.add_link(l.u, l.v, l.bw);
    return net;
}

inline VirtualNetworkRequest make_vnr(std::uint32_t id, const std::vector<double>& cpu,
                                      const std::vector<VirtualLink>& links, double t_start = 0.0,
                                      double t_end = 100.0) {
    VirtualNetworkRequest r;
    r.vnr_id = id;
    for (std::size_t i = 0; i < cpu.size(); ++i) r.vnodes.push_back({std::uint32_t(i), cpu[i]});
    r.vlinks = links;
    r.t_start = t_start;
    r.t_end = t_end;
    return r;
}

/// Random simple graph over `n` nodes with each pair linked with probability `p`.
inline SubstrateNetwork random_net(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> res(10, 100);
    SubstrateNetwork net(1);
    for (std::size_t i = 0; i < n; ++i) net.add_node(0, {u(rng), u(rng)}, res(rng));
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            if (u(rng) < p) net.add_link(a, b, res(rng));
        }
    }
    return net;
}

/// Random membership rows in (0, 1] for `n` nodes, labels by argmax.
inline FuzzifiedInput random_input(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    FuzzifiedInput in;
    in.memberships.resize(n);
    in.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& m : in.memberships[i]) m = u(rng);
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            std::size_t arg = 0;
            for (std::size_t l = 1; l < kLabelCount; ++l) {
                if (in.memberships[i][k * kLabelCount + l] > in.memberships[i][k * kLabelCount + arg]) arg = l;
            }
            in.labels[i][k] = kLabels[arg];
        }
    }
    return in;
}

/// Four-node path 0-1-2-3 (CPU 100/80/60/40, links of 50) and five requests
/// whose NRM outcomes are traced by hand: 0, 1 and 3 are accepted (1 expires
/// at t=30 before request 2 arrives), 2 and 4 are rejected for lack of CPU.
///   req 0: {30,20} bw 10 -> hosts (1,2), 1 hop, revenue 60, cost 60
///   req 1: {10,10} bw 5  -> hosts (0,1), 1 hop, revenue 25, cost 25
///   req 3: {95,45,40} bw 10 (0-2) + 5 (1-2) -> hosts (0,1,2), hops 2 and 1,
///          revenue 195, cost 180 + 20 + 5 = 205
struct ScriptedRun {
    SubstrateNetwork substrate;
    std::vector<VirtualNetworkRequest> vnrs;
};

inline ScriptedRun scripted_five() {
    ScriptedRun s{make_net({100, 80, 60, 40}, {{0, 1, 50}, {1, 2, 50}, {2, 3, 50}}), {}};
    s.vnrs.push_back(make_vnr(0, {30, 20}, {{0, 1, 10}}, 10, 5000));
    s.vnrs.push_back(make_vnr(1, {10, 10}, {{0, 1, 5}}, 20, 30));
    s.vnrs.push_back(make_vnr(2, {90, 55}, {{0, 1, 20}}, 40, 900));
    s.vnrs.push_back(make_vnr(3, {95, 45, 40}, {{0, 2, 10}, {1, 2, 5}}, 50, 6000));
    s.vnrs.push_back(make_vnr(4, {10, 10}, {{0, 1, 5}}, 60, 100));
    return s;
}

}  // namespace vne::testing
