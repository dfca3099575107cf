#include "vne/features.hpp"

#include <algorithm>

namespace vne {

std::vector<double> FeatureMatrix::column(std::size_t k) const {
    std::vector<double> out(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) out[i] = normalized[i][k];
    return out;
}

double available_node_resource(const SubstrateNetwork& net, NodeId i) {
    return net.node(i).cpu_residual;
}

double available_link_resource(const SubstrateNetwork& net, NodeId i) {
    double total = 0.0;
    for (LinkId l : net.incident(i)) total += net.link(l).bw_residual;
    return total;
}

double average_distance(const SubstrateNetwork& net, NodeId i) {
    constexpr double hops = 1.0;
    const auto& here = net.node(i).location;
    double total = 0.0;
    for (LinkId l : net.incident(i)) {
        total += euclidean(here, net.node(net.link(l).other(i)).location) / (1.0 + hops);
    }
    return total;
}

std::vector<double> normalize_column(std::span<const double> values) {
    std::vector<double> out(values.size(), 0.5);
    if (values.empty()) return out;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double span = *hi - *lo;
    if (!(span > 0.0)) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::clamp((values[i] - *lo) / span, 0.0, 1.0);
    }
    return out;
}

FeatureMatrix build_feature_matrix(const SubstrateNetwork& net) {
    const std::size_t n = net.node_count();
    FeatureMatrix fm;
    fm.raw.resize(n);
    fm.normalized.resize(n);
    std::array<std::vector<double>, kFeatureCount> cols;
    for (auto& c : cols) c.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        fm.raw[i] = {available_node_resource(net, i), available_link_resource(net, i),
                     average_distance(net, i)};
        for (std::size_t k = 0; k < kFeatureCount; ++k) cols[k][i] = fm.raw[i][k];
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const auto scaled = normalize_column(cols[k]);
        for (std::size_t i = 0; i < n; ++i) fm.normalized[i][k] = scaled[i];
    }
    return fm;
}

}  // namespace vne
