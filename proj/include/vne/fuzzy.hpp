#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "vne/features.hpp"
#include "vne/labels.hpp"

namespace vne {

inline constexpr double kSigmaMin = 1e-3;

/// Gaussian membership function exp(-(x - c)^2 / (2 sigma^2)).
struct MembershipFunction {
    double center = 0.0;
    double sigma = kSigmaMin;
    Label label = Label::M;

    bool operator==(const MembershipFunction&) const = default;
};

/// Value in (0, 1]; far tails are floored at the smallest normal double.
double membership(const MembershipFunction& mf, double x);

/// Five membership functions for one input dimension, VL..VH.
using DimensionPartition = std::array<MembershipFunction, kLabelCount>;

struct FuzzyPartition {
    std::array<DimensionPartition, kFeatureCount> dims;

    bool operator==(const FuzzyPartition&) const = default;
};

struct KMeansOptions {
    int max_iterations = 100;
    double tolerance = 1e-6;
    int restarts = 10;
};

/// 1-D k-means (k = 5, k-means++ seeding). Centers become MF centers, the
/// population standard deviation of each cluster becomes sigma (clamped to
/// kSigmaMin). Fewer than five distinct values falls back to evenly spaced
/// centers over [0, 1] with sigma 0.1.
DimensionPartition fit_partition(std::span<const double> values, std::uint64_t seed,
                                 const KMeansOptions& opts = {});

/// Fits each normalized feature column independently.
FuzzyPartition fit_partitions(const FeatureMatrix& features, std::uint64_t seed,
                              const KMeansOptions& opts = {});

/// Within-cluster sum of squares of `values` against the partition centers.
double within_cluster_ss(std::span<const double> values, const DimensionPartition& part);

/// 3 x 5 membership values for one node, dimension-major.
using MembershipRow = std::array<double, kFeatureCount * kLabelCount>;
using LabelTriple = std::array<Label, kFeatureCount>;

struct FuzzifiedInput {
    std::vector<MembershipRow> memberships;
    std::vector<LabelTriple> labels;  // argmax label per dimension

    std::size_t rows() const { return memberships.size(); }
    double at(std::size_t node, std::size_t dim, Label l) const {
        return memberships[node][dim * kLabelCount + index(l)];
    }
};

/// Argmax ties resolve toward the lower label.
FuzzifiedInput fuzzify(const FeatureMatrix& features, const FuzzyPartition& partition);

nlohmann::json to_json(const FuzzyPartition& partition);
FuzzyPartition partition_from_json(const nlohmann::json& j);

}  // namespace vne
