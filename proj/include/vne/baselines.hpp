#pragma once

#include <vector>

#include "vne/graph.hpp"

namespace vne {

struct NodeRankParams {
    double epsilon = 1e-4;
    int max_hop = 3;
    double p_jump = 0.15;
    double p_forward = 0.85;
    int max_iterations = 10000;
};

struct NodeRankResult {
    std::vector<double> scores;  // sums to 1
    int iterations = 0;
    double last_change = 0.0;  // L1 distance between the final two iterates
};

/// Resource attractiveness cpu_residual(v) * sum of incident bw_residual(v).
double node_attractiveness(const SubstrateNetwork& net, NodeId v);

/// Row-stochastic NodeRank transition matrix (dense, row-major): forward moves
/// go to nodes within max_hop hops in proportion to attractiveness, jumps are
/// uniform. A node with no attractive forward target jumps with certainty.
std::vector<double> noderank_transition(const SubstrateNetwork& net, const NodeRankParams& params);

/// Stationary scores by power iteration, stopping when the L1 change drops
/// below epsilon.
NodeRankResult noderank(const SubstrateNetwork& net, const NodeRankParams& params = {});
std::vector<double> noderank_scores(const SubstrateNetwork& net, const NodeRankParams& params = {});

/// cpu_residual * incident bandwidth, before normalization.
std::vector<double> nrm_raw(const SubstrateNetwork& net);
/// Normalized to sum 1 (uniform when every raw score is zero).
std::vector<double> nrm_scores(const SubstrateNetwork& net);

}  // namespace vne
