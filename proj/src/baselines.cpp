#include "vne/baselines.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "vne/features.hpp"

namespace vne {

namespace {

std::vector<double> normalized_or_uniform(std::vector<double> v) {
    double total = 0.0;
    for (double x : v) total += x;
    if (!(total > 0.0)) {
        std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
        return v;
    }
    for (double& x : v) x /= total;
    return v;
}

// Nodes within [1, max_hop] hops of `from`.
std::vector<NodeId> hop_neighbourhood(const SubstrateNetwork& net, NodeId from, int max_hop) {
    constexpr int unseen = std::numeric_limits<int>::max();
    std::vector<int> dist(net.node_count(), unseen);
    std::vector<NodeId> out;
    std::deque<NodeId> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        if (dist[u] == max_hop) continue;
        for (LinkId l : net.incident(u)) {
            const NodeId v = net.link(l).other(u);
            if (dist[v] != unseen) continue;
            dist[v] = dist[u] + 1;
            out.push_back(v);
            q.push_back(v);
        }
    }
    return out;
}

}  // namespace

double node_attractiveness(const SubstrateNetwork& net, NodeId v) {
    return available_node_resource(net, v) * available_link_resource(net, v);
}

std::vector<double> noderank_transition(const SubstrateNetwork& net, const NodeRankParams& params) {
    if (params.max_hop < 1) throw std::invalid_argument("max_hop must be at least 1");
    const std::size_t n = net.node_count();
    std::vector<double> h(n);
    for (NodeId v = 0; v < n; ++v) h[v] = node_attractiveness(net, v);

    std::vector<double> t(n * n, 0.0);
    const double uniform = 1.0 / static_cast<double>(n);
    for (NodeId u = 0; u < n; ++u) {
        double* row = &t[u * n];
        const auto reach = hop_neighbourhood(net, u, params.max_hop);
        double mass = 0.0;
        for (NodeId v : reach) mass += h[v];
        double jump = params.p_jump;
        if (mass > 0.0) {
            for (NodeId v : reach) row[v] += params.p_forward * h[v] / mass;
        } else {
            jump += params.p_forward;
        }
        for (std::size_t v = 0; v < n; ++v) row[v] += jump * uniform;
    }
    return t;
}

NodeRankResult noderank(const SubstrateNetwork& net, const NodeRankParams& params) {
    const std::size_t n = net.node_count();
    NodeRankResult res;
    if (n == 0) return res;
    const auto t = noderank_transition(net, params);
    std::vector<double> r(n, 1.0 / static_cast<double>(n)), next(n);
    for (res.iterations = 1; res.iterations <= params.max_iterations; ++res.iterations) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            const double ru = r[u];
            const double* row = &t[u * n];
            for (std::size_t v = 0; v < n; ++v) next[v] += ru * row[v];
        }
        res.last_change = 0.0;
        for (std::size_t v = 0; v < n; ++v) res.last_change += std::abs(next[v] - r[v]);
        r.swap(next);
        if (res.last_change < params.epsilon) break;
    }
    res.iterations = std::min(res.iterations, params.max_iterations);
    res.scores = normalized_or_uniform(std::move(r));
    return res;
}

std::vector<double> noderank_scores(const SubstrateNetwork& net, const NodeRankParams& params) {
    return noderank(net, params).scores;
}

std::vector<double> nrm_raw(const SubstrateNetwork& net) {
    std::vector<double> raw(net.node_count());
    for (NodeId v = 0; v < raw.size(); ++v) raw[v] = node_attractiveness(net, v);
    return raw;
}

std::vector<double> nrm_scores(const SubstrateNetwork& net) {
    return normalized_or_uniform(nrm_raw(net));
}

}  // namespace vne
