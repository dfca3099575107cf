#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vne/baselines.hpp"
#include "vne/defuzz.hpp"
#include "vne/features.hpp"
#include "vne/fuzzy.hpp"
#include "vne/graph.hpp"
#include "vne/implication.hpp"
#include "vne/rulebase.hpp"

namespace vne {

enum class PolicyKind { dnfs, noderank, nrm };

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct DnfsOptions {
    ScoringConfig scoring;
    KMeansOptions kmeans;
    std::uint64_t partition_seed = 1;
    /// Fit the fuzzy partition once and reuse it instead of refitting every
    /// episode.
    bool freeze_partition = false;
};

/// The neuro-fuzzy policy's learnable state: implication network, rule base,
/// and the fuzzy partition cache.
struct DnfsAgent {
    ImplicationNetwork network;
    RuleBase rules;
    DnfsOptions options;
    TrainConfig train;
    std::optional<FuzzyPartition> partition;

    static DnfsAgent fresh(std::uint64_t seed, DnfsOptions options = {}, TrainConfig train = {},
                           ImplicationShape shape = {});
};

/// Everything computed while scoring one episode with the DNFS pipeline.
struct DnfsTrace {
    FeatureMatrix features;
    FuzzyPartition partition;
    FuzzifiedInput input;
    EpisodeEvaluation eval;
};

/// Features -> fuzzify -> implication network -> defuzzify -> probabilities.
DnfsTrace dnfs_score(const SubstrateNetwork& net, DnfsAgent& agent);

/// Selects a node scorer. DNFS policies borrow the agent; the caller keeps it
/// alive for the policy's lifetime.
class EmbeddingPolicy {
public:
    static EmbeddingPolicy dnfs(DnfsAgent& agent);
    static EmbeddingPolicy noderank(NodeRankParams params = {});
    static EmbeddingPolicy nrm();

    PolicyKind kind() const { return kind_; }
    DnfsAgent* agent() const { return agent_; }
    const NodeRankParams& noderank_params() const { return noderank_; }

private:
    PolicyKind kind_ = PolicyKind::nrm;
    DnfsAgent* agent_ = nullptr;
    NodeRankParams noderank_;
};

/// Per-node embedding probabilities under the policy's scorer.
std::vector<double> score_nodes(const SubstrateNetwork& net, EmbeddingPolicy& policy);

/// Greedy node mapping: virtual nodes by descending demand (ties by id), each
/// taking the most probable unused substrate node with enough CPU. Empty on
/// failure.
std::optional<std::vector<NodeId>> map_nodes(std::span<const double> p,
                                             const VirtualNetworkRequest& vnr,
                                             const SubstrateNetwork& net);

/// Routes each vlink in index order over the minimum-hop path with enough
/// residual bandwidth, with earlier vlinks' debits visible to later ones.
std::optional<std::vector<PathAssignment>> map_links(std::span<const NodeId> node_assignment,
                                                     const VirtualNetworkRequest& vnr,
                                                     const SubstrateNetwork& net);

/// Sum of CPU demands plus sum of bandwidth demands.
double revenue(const VirtualNetworkRequest& vnr);
/// Sum of CPU demands plus, per vlink, hop count times bandwidth demand.
double cost(const VirtualNetworkRequest& vnr, std::span<const PathAssignment> links);

enum class Mode { train, eval };

struct EmbeddingOutcome {
    EmbeddingResult result;
    std::optional<Allocation> allocation;  // engaged iff accepted
    std::vector<double> probabilities;     // scorer output used for the decision
    std::optional<double> loss;            // set when a training step ran
};

/// One request end to end. On success the allocation is committed and, for a
/// DNFS policy in train mode, the rule base and network weights are updated.
/// On failure nothing is committed and no weights change.
EmbeddingOutcome embed_vnr(SubstrateNetwork& net, const VirtualNetworkRequest& vnr,
                           EmbeddingPolicy& policy, Mode mode);

/// Uniform mass over the substrate nodes hosting the request, zero elsewhere.
std::vector<double> placement_distribution(std::size_t node_count,
                                           std::span<const NodeId> placement);

}  // namespace vne
