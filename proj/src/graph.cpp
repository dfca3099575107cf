#include "vne/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace vne {

double euclidean(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void validate(const VirtualNetworkRequest& vnr) {
    if (!(vnr.t_end > vnr.t_start)) {
        throw GraphError(fmt::format("vnr {}: t_end must exceed t_start", vnr.vnr_id));
    }
    for (std::size_t i = 0; i < vnr.vnodes.size(); ++i) {
        if (vnr.vnodes[i].id != i) {
            throw GraphError(fmt::format("vnr {}: vnode ids must be 0..n-1 in order", vnr.vnr_id));
        }
        if (!(vnr.vnodes[i].cpu_demand > 0.0)) {
            throw GraphError(fmt::format("vnr {}: vnode {} demand must be positive", vnr.vnr_id, i));
        }
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& vl : vnr.vlinks) {
        if (vl.a == vl.b || vl.a >= vnr.vnodes.size() || vl.b >= vnr.vnodes.size()) {
            throw GraphError(fmt::format("vnr {}: bad vlink {}-{}", vnr.vnr_id, vl.a, vl.b));
        }
        if (!(vl.bw_demand > 0.0)) {
            throw GraphError(fmt::format("vnr {}: vlink demand must be positive", vnr.vnr_id));
        }
        if (!seen.insert(std::minmax(vl.a, vl.b)).second) {
            throw GraphError(fmt::format("vnr {}: parallel vlink {}-{}", vnr.vnr_id, vl.a, vl.b));
        }
    }
}

NodeId SubstrateNetwork::add_node(int domain, Point location, double cpu_capacity) {
    if (domain < 0 || domain >= domain_count_) {
        throw GraphError(fmt::format("domain {} outside [0, {})", domain, domain_count_));
    }
    if (!(cpu_capacity >= 0.0)) throw GraphError("negative node capacity");
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({id, domain, location, cpu_capacity, cpu_capacity});
    adjacency_.emplace_back();
    return id;
}

LinkId SubstrateNetwork::add_link(NodeId u, NodeId v, double bw_capacity) {
    if (u >= nodes_.size() || v >= nodes_.size()) {
        throw GraphError(fmt::format("link {}-{} references unknown node", u, v));
    }
    if (u == v) throw GraphError(fmt::format("self-loop on node {}", u));
    if (find_link(u, v)) throw GraphError(fmt::format("parallel link {}-{}", u, v));
    if (!(bw_capacity >= 0.0)) throw GraphError("negative link capacity");

    const auto id = static_cast<LinkId>(links_.size());
    const auto kind =
        nodes_[u].domain == nodes_[v].domain ? LinkKind::intra_domain : LinkKind::inter_domain;
    links_.push_back({u, v, kind, bw_capacity, bw_capacity});

    auto insert_sorted = [this](NodeId at, LinkId link) {
        auto& adj = adjacency_[at];
        const NodeId far = links_[link].other(at);
        auto pos = std::lower_bound(adj.begin(), adj.end(), far, [&](LinkId l, NodeId target) {
            return links_[l].other(at) < target;
        });
        adj.insert(pos, link);
    };
    insert_sorted(u, id);
    insert_sorted(v, id);
    return id;
}

std::optional<LinkId> SubstrateNetwork::find_link(NodeId u, NodeId v) const {
    if (u >= adjacency_.size()) return std::nullopt;
    for (LinkId l : adjacency_[u]) {
        if (links_[l].other(u) == v) return l;
    }
    return std::nullopt;
}

std::vector<double> SubstrateNetwork::link_residuals() const {
    std::vector<double> out(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) out[i] = links_[i].bw_residual;
    return out;
}

Allocation SubstrateNetwork::allocate(const VirtualNetworkRequest& vnr,
                                      std::span<const NodeId> node_assignment,
                                      std::span<const PathAssignment> link_assignment) {
    if (node_assignment.size() != vnr.vnodes.size()) {
        throw InfeasibleAssignment("node assignment does not cover every vnode");
    }
    if (link_assignment.size() != vnr.vlinks.size()) {
        throw InfeasibleAssignment("link assignment does not cover every vlink");
    }

    std::map<NodeId, double> node_need;
    for (std::size_t i = 0; i < node_assignment.size(); ++i) {
        const NodeId s = node_assignment[i];
        if (s >= nodes_.size()) throw InfeasibleAssignment("unknown substrate node");
        if (node_need.contains(s)) {
            throw InfeasibleAssignment(fmt::format("substrate node {} hosts two vnodes", s));
        }
        node_need[s] = vnr.vnodes[i].cpu_demand;
    }

    std::map<LinkId, double> link_need;
    for (const auto& pa : link_assignment) {
        if (pa.vlink >= vnr.vlinks.size()) throw InfeasibleAssignment("unknown vlink");
        const auto& vl = vnr.vlinks[pa.vlink];
        if (pa.hops() < 1 || pa.path.front() != node_assignment[vl.a] ||
            pa.path.back() != node_assignment[vl.b]) {
            throw InfeasibleAssignment(fmt::format("path for vlink {} has wrong endpoints", pa.vlink));
        }
        for (std::size_t k = 0; k + 1 < pa.path.size(); ++k) {
            auto l = find_link(pa.path[k], pa.path[k + 1]);
            if (!l) {
                throw InfeasibleAssignment(
                    fmt::format("path hop {}-{} is not a link", pa.path[k], pa.path[k + 1]));
            }
            link_need[*l] += vl.bw_demand;
        }
    }

    for (const auto& [n, need] : node_need) {
        if (nodes_[n].cpu_residual < need) {
            throw InfeasibleAssignment(fmt::format("node {} residual {} below demand {}", n,
                                                   nodes_[n].cpu_residual, need));
        }
    }
    for (const auto& [l, need] : link_need) {
        if (links_[l].bw_residual < need) {
            throw InfeasibleAssignment(fmt::format("link {} residual {} below demand {}", l,
                                                   links_[l].bw_residual, need));
        }
    }

    Allocation txn;
    txn.released_ = false;
    for (const auto& [n, need] : node_need) {
        nodes_[n].cpu_residual -= need;
        txn.nodes_.push_back({n, need});
    }
    for (const auto& [l, need] : link_need) {
        links_[l].bw_residual -= need;
        txn.links_.push_back({l, need});
    }
    return txn;
}

void SubstrateNetwork::release(Allocation& allocation) {
    if (allocation.released_) throw DoubleRelease();
    for (const auto& d : allocation.nodes_) nodes_[d.node].cpu_residual += d.amount;
    for (const auto& d : allocation.links_) links_[d.link].bw_residual += d.amount;
    allocation.released_ = true;
}

void SubstrateNetwork::reset() {
    for (auto& n : nodes_) n.cpu_residual = n.cpu_capacity;
    for (auto& l : links_) l.bw_residual = l.bw_capacity;
}

std::optional<std::vector<NodeId>> shortest_hop_path(const SubstrateNetwork& net,
                                                     std::span<const double> link_residual,
                                                     NodeId from, NodeId to, double min_bw) {
    const std::size_t n = net.node_count();
    if (from >= n || to >= n) throw GraphError("shortest_hop_path: node out of range");
    if (from == to) return std::vector<NodeId>{from};

    // Distances to `to`, then a greedy walk from `from` taking the smallest
    // neighbour one hop closer: this yields the lexicographically smallest
    // minimum-hop sequence.
    constexpr auto unreached = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(n, unreached);
    std::deque<NodeId> frontier{to};
    dist[to] = 0;
    while (!frontier.empty() && dist[from] == unreached) {
        const NodeId cur = frontier.front();
        frontier.pop_front();
        for (LinkId l : net.incident(cur)) {
            if (link_residual[l] < min_bw) continue;
            const NodeId nb = net.link(l).other(cur);
            if (dist[nb] != unreached) continue;
            dist[nb] = dist[cur] + 1;
            frontier.push_back(nb);
        }
    }
    if (dist[from] == unreached) return std::nullopt;

    std::vector<NodeId> path{from};
    NodeId cur = from;
    while (cur != to) {
        // incident() is ordered by neighbour id, so the first match is smallest.
        for (LinkId l : net.incident(cur)) {
            if (link_residual[l] < min_bw) continue;
            const NodeId nb = net.link(l).other(cur);
            if (dist[nb] != unreached && dist[nb] + 1 == dist[cur]) {
                cur = nb;
                break;
            }
        }
        path.push_back(cur);
    }
    return path;
}

std::optional<std::vector<NodeId>> shortest_hop_path(const SubstrateNetwork& net, NodeId from,
                                                     NodeId to, double min_bw) {
    const auto residual = net.link_residuals();
    return shortest_hop_path(net, residual, from, to, min_bw);
}

}  // namespace vne
