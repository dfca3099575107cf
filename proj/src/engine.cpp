#include "vne/engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace vne {

std::string_view policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::dnfs: return "dnfs";
        case PolicyKind::noderank: return "noderank";
        case PolicyKind::nrm: return "nrm";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
    for (auto k : {PolicyKind::dnfs, PolicyKind::noderank, PolicyKind::nrm}) {
        if (policy_name(k) == name) return k;
    }
    return std::nullopt;
}

DnfsAgent DnfsAgent::fresh(std::uint64_t seed, DnfsOptions options, TrainConfig train,
                           ImplicationShape shape) {
    train.validate();
    options.scoring.scale.validate();
    return {ImplicationNetwork::init_weights(shape, seed), RuleBase{}, options, train,
            std::nullopt};
}

DnfsTrace dnfs_score(const SubstrateNetwork& net, DnfsAgent& agent) {
    DnfsTrace trace;
    trace.features = build_feature_matrix(net);
    if (agent.options.freeze_partition && agent.partition) {
        trace.partition = *agent.partition;
    } else {
        trace.partition =
            fit_partitions(trace.features, agent.options.partition_seed, agent.options.kmeans);
        agent.partition = trace.partition;
    }
    trace.input = fuzzify(trace.features, trace.partition);
    trace.eval = evaluate_episode(agent.network, trace.input, agent.options.scoring);
    return trace;
}

EmbeddingPolicy EmbeddingPolicy::dnfs(DnfsAgent& agent) {
    EmbeddingPolicy p;
    p.kind_ = PolicyKind::dnfs;
    p.agent_ = &agent;
    return p;
}

EmbeddingPolicy EmbeddingPolicy::noderank(NodeRankParams params) {
    EmbeddingPolicy p;
    p.kind_ = PolicyKind::noderank;
    p.noderank_ = params;
    return p;
}

EmbeddingPolicy EmbeddingPolicy::nrm() { return {}; }

std::vector<double> score_nodes(const SubstrateNetwork& net, EmbeddingPolicy& policy) {
    switch (policy.kind()) {
        case PolicyKind::dnfs: return dnfs_score(net, *policy.agent()).eval.probabilities;
        case PolicyKind::noderank: return noderank_scores(net, policy.noderank_params());
        case PolicyKind::nrm: return nrm_scores(net);
    }
    throw std::logic_error("unknown policy");
}

std::optional<std::vector<NodeId>> map_nodes(std::span<const double> p,
                                             const VirtualNetworkRequest& vnr,
                                             const SubstrateNetwork& net) {
    if (p.size() != net.node_count()) throw std::invalid_argument("map_nodes: score size mismatch");

    std::vector<NodeId> candidates(net.node_count());
    std::iota(candidates.begin(), candidates.end(), 0);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](NodeId a, NodeId b) { return p[a] > p[b]; });

    std::vector<std::size_t> order(vnr.vnodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return vnr.vnodes[a].cpu_demand > vnr.vnodes[b].cpu_demand;
    });

    std::vector<NodeId> assignment(vnr.vnodes.size());
    std::vector<bool> used(net.node_count(), false);
    for (std::size_t v : order) {
        const double demand = vnr.vnodes[v].cpu_demand;
        auto it = std::find_if(candidates.begin(), candidates.end(), [&](NodeId s) {
            return !used[s] && net.node(s).cpu_residual >= demand;
        });
        if (it == candidates.end()) return std::nullopt;
        used[*it] = true;
        assignment[v] = *it;
    }
    return assignment;
}

std::optional<std::vector<PathAssignment>> map_links(std::span<const NodeId> node_assignment,
                                                     const VirtualNetworkRequest& vnr,
                                                     const SubstrateNetwork& net) {
    auto residual = net.link_residuals();
    std::vector<PathAssignment> out;
    out.reserve(vnr.vlinks.size());
    for (std::size_t k = 0; k < vnr.vlinks.size(); ++k) {
        const auto& vl = vnr.vlinks[k];
        auto path = shortest_hop_path(net, residual, node_assignment[vl.a],
                                      node_assignment[vl.b], vl.bw_demand);
        if (!path || path->size() < 2) return std::nullopt;
        for (std::size_t h = 0; h + 1 < path->size(); ++h) {
            residual[*net.find_link((*path)[h], (*path)[h + 1])] -= vl.bw_demand;
        }
        out.push_back({k, std::move(*path)});
    }
    return out;
}

double revenue(const VirtualNetworkRequest& vnr) {
    double total = 0.0;
    for (const auto& v : vnr.vnodes) total += v.cpu_demand;
    for (const auto& l : vnr.vlinks) total += l.bw_demand;
    return total;
}

double cost(const VirtualNetworkRequest& vnr, std::span<const PathAssignment> links) {
    double total = 0.0;
    for (const auto& v : vnr.vnodes) total += v.cpu_demand;
    for (const auto& pa : links) {
        total += static_cast<double>(pa.hops()) * vnr.vlinks.at(pa.vlink).bw_demand;
    }
    return total;
}

std::vector<double> placement_distribution(std::size_t node_count,
                                           std::span<const NodeId> placement) {
    std::vector<double> out(node_count, 0.0);
    if (placement.empty()) return out;
    const double share = 1.0 / static_cast<double>(placement.size());
    for (NodeId s : placement) out.at(s) += share;
    return out;
}

namespace {

void train_on_success(DnfsAgent& agent, const DnfsTrace& trace, std::span<const NodeId> placement,
                      EmbeddingOutcome& outcome) {
    for (const auto& rule : derive_rules(trace.input, trace.eval.probabilities)) {
        agent.rules.update(rule);
    }
    const auto target = agent.train.target_mode == TargetMode::one_hot
                            ? placement_distribution(trace.eval.scores.size(), placement)
                            : trace.eval.scores;
    const auto d_out = loss_output_gradient(trace.eval, target, agent.options.scoring);
    const auto grads = backward(agent.network, trace.eval.tape, d_out);
    outcome.loss = loss(trace.eval.probabilities, target);
    sgd_step(agent.network, grads, agent.train.learning_rate);
}

}  // namespace

EmbeddingOutcome embed_vnr(SubstrateNetwork& net, const VirtualNetworkRequest& vnr,
                           EmbeddingPolicy& policy, Mode mode) {
    EmbeddingOutcome outcome;
    outcome.result.vnr_id = vnr.vnr_id;

    std::optional<DnfsTrace> trace;
    if (policy.kind() == PolicyKind::dnfs) {
        trace = dnfs_score(net, *policy.agent());
        outcome.probabilities = trace->eval.probabilities;
    } else {
        outcome.probabilities = score_nodes(net, policy);
    }

    auto nodes = map_nodes(outcome.probabilities, vnr, net);
    if (!nodes) return outcome;
    auto links = map_links(*nodes, vnr, net);
    if (!links) return outcome;

    outcome.allocation = net.allocate(vnr, *nodes, *links);
    auto& r = outcome.result;
    r.accepted = true;
    r.revenue = revenue(vnr);
    r.cost = cost(vnr, *links);
    r.node_assignment = std::move(*nodes);
    r.link_assignment = std::move(*links);

    if (mode == Mode::train && trace) {
        train_on_success(*policy.agent(), *trace, r.node_assignment, outcome);
    }
    return outcome;
}

}  // namespace vne
