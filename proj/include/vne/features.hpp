#pragma once

#include <array>
#include <span>
#include <vector>

#include "vne/graph.hpp"

namespace vne {

inline constexpr std::size_t kFeatureCount = 3;

/// Per-node feature rows: available node resource, available link resource,
/// average distance. `normalized` is column-wise min-max scaled into [0, 1].
struct FeatureMatrix {
    std::vector<std::array<double, kFeatureCount>> raw;
    std::vector<std::array<double, kFeatureCount>> normalized;

    std::size_t rows() const { return normalized.size(); }
    std::vector<double> column(std::size_t k) const;
};

double available_node_resource(const SubstrateNetwork& net, NodeId i);
double available_link_resource(const SubstrateNetwork& net, NodeId i);

/// Sum over direct neighbours j of |loc(i) - loc(j)| / (1 + h(i, j)) with
/// h = 1 for a direct link. Isolated nodes score 0.
double average_distance(const SubstrateNetwork& net, NodeId i);

/// Min-max scaling; a constant column maps to 0.5 everywhere.
std::vector<double> normalize_column(std::span<const double> values);

FeatureMatrix build_feature_matrix(const SubstrateNetwork& net);

}  // namespace vne
