#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vne {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double euclidean(const Point& a, const Point& b);

struct SubstrateNode {
    NodeId id = 0;
    int domain = 0;
    Point location;
    double cpu_capacity = 0.0;
    double cpu_residual = 0.0;

    bool operator==(const SubstrateNode&) const = default;
};

enum class LinkKind { intra_domain, inter_domain };

struct SubstrateLink {
    NodeId u = 0;
    NodeId v = 0;
    LinkKind kind = LinkKind::intra_domain;
    double bw_capacity = 0.0;
    double bw_residual = 0.0;

    NodeId other(NodeId end) const { return end == u ? v : u; }

    bool operator==(const SubstrateLink&) const = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleAssignment : public GraphError {
public:
    using GraphError::GraphError;
};

class DoubleRelease : public GraphError {
public:
    DoubleRelease() : GraphError("allocation already released") {}
};

struct VirtualNode {
    std::uint32_t id = 0;
    double cpu_demand = 0.0;

    bool operator==(const VirtualNode&) const = default;
};

struct VirtualLink {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double bw_demand = 0.0;

    bool operator==(const VirtualLink&) const = default;
};

struct VirtualNetworkRequest {
    std::uint32_t vnr_id = 0;
    std::vector<VirtualNode> vnodes;
    std::vector<VirtualLink> vlinks;
    double t_start = 0.0;
    double t_end = 0.0;

    bool operator==(const VirtualNetworkRequest&) const = default;
};

/// Throws GraphError if the request breaks its structural invariants.
void validate(const VirtualNetworkRequest& vnr);

/// A virtual link routed over a substrate path.
struct PathAssignment {
    std::size_t vlink = 0;
    std::vector<NodeId> path;

    std::size_t hops() const { return path.empty() ? 0 : path.size() - 1; }

    bool operator==(const PathAssignment&) const = default;
};

struct EmbeddingResult {
    std::uint32_t vnr_id = 0;
    std::vector<NodeId> node_assignment;  // indexed by vnode
    std::vector<PathAssignment> link_assignment;  // indexed by vlink
    bool accepted = false;
    double revenue = 0.0;
    double cost = 0.0;
};

/// Transaction handle produced by SubstrateNetwork::allocate. Move-only so a
/// single handle owns the right to release.
class Allocation {
public:
    struct NodeDebit {
        NodeId node;
        double amount;
    };
    struct LinkDebit {
        LinkId link;
        double amount;
    };

    Allocation() = default;
    Allocation(const Allocation&) = delete;
    Allocation& operator=(const Allocation&) = delete;
    Allocation(Allocation&&) noexcept = default;
    Allocation& operator=(Allocation&&) noexcept = default;

    bool released() const { return released_; }
    std::span<const NodeDebit> node_debits() const { return nodes_; }
    std::span<const LinkDebit> link_debits() const { return links_; }

private:
    friend class SubstrateNetwork;
    std::vector<NodeDebit> nodes_;
    std::vector<LinkDebit> links_;
    bool released_ = true;
};

class SubstrateNetwork {
public:
    SubstrateNetwork() = default;
    explicit SubstrateNetwork(int domain_count) : domain_count_(domain_count) {}

    NodeId add_node(int domain, Point location, double cpu_capacity);
    /// Rejects self-loops, parallel links and unknown endpoints.
    LinkId add_link(NodeId u, NodeId v, double bw_capacity);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }
    int domain_count() const { return domain_count_; }

    const SubstrateNode& node(NodeId id) const { return nodes_.at(id); }
    const SubstrateLink& link(LinkId id) const { return links_.at(id); }
    std::span<const SubstrateNode> nodes() const { return nodes_; }
    std::span<const SubstrateLink> links() const { return links_; }

    /// Incident link ids, ordered by the id of the opposite endpoint.
    std::span<const LinkId> incident(NodeId id) const { return adjacency_.at(id); }
    std::optional<LinkId> find_link(NodeId u, NodeId v) const;

    /// Current link residuals indexed by LinkId.
    std::vector<double> link_residuals() const;

    /// Commits node and link debits atomically; throws InfeasibleAssignment
    /// (leaving the network untouched) if any residual would go negative.
    Allocation allocate(const VirtualNetworkRequest& vnr, std::span<const NodeId> node_assignment,
                        std::span<const PathAssignment> link_assignment);
    void release(Allocation& allocation);

    /// Restores every residual to its capacity.
    void reset();

    bool operator==(const SubstrateNetwork& other) const {
        return domain_count_ == other.domain_count_ && nodes_ == other.nodes_ &&
               links_ == other.links_;
    }

private:
    int domain_count_ = 1;
    std::vector<SubstrateNode> nodes_;
    std::vector<SubstrateLink> links_;
    std::vector<std::vector<LinkId>> adjacency_;
};

/// Minimum-hop path from `from` to `to` using only links whose residual is at
/// least `min_bw`. Among equal-hop paths the lexicographically smallest node
/// sequence wins. `from == to` yields the single-node path.
std::optional<std::vector<NodeId>> shortest_hop_path(const SubstrateNetwork& net, NodeId from,
                                                     NodeId to, double min_bw);

/// Same search against an explicit residual vector (indexed by LinkId), used
/// to route against tentative debits that are not yet committed.
std::optional<std::vector<NodeId>> shortest_hop_path(const SubstrateNetwork& net,
                                                     std::span<const double> link_residual,
                                                     NodeId from, NodeId to, double min_bw);

}  // namespace vne
