#include "vne/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace vne {

namespace {

constexpr std::array<const char*, kFeatureCount> kDimNames{"avail_node_resource",
                                                           "avail_link_resource", "avg_distance"};

std::size_t nearest(double x, std::span<const double> centers) {
    std::size_t best = 0;
    double best_d = std::abs(x - centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = std::abs(x - centers[c]);
        if (d < best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

std::vector<double> seed_centers(std::span<const double> values, std::size_t k,
                                 std::mt19937_64& rng) {
    std::vector<double> centers;
    std::uniform_int_distribution<std::size_t> first(0, values.size() - 1);
    centers.push_back(values[first(rng)]);
    std::vector<double> d2(values.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - centers[nearest(values[i], centers)];
            d2[i] = d * d;
            total += d2[i];
        }
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        std::size_t pick = values.size() - 1;
        for (std::size_t i = 0; i < values.size(); ++i) {
            target -= d2[i];
            if (target < 0.0 && d2[i] > 0.0) {
                pick = i;
                break;
            }
        }
        // Guard against rounding landing on an existing center.
        while (d2[pick] == 0.0 && pick > 0) --pick;
        centers.push_back(values[pick]);
    }
    return centers;
}

double lloyd(std::span<const double> values, std::vector<double>& centers,
             const KMeansOptions& opts) {
    const std::size_t k = centers.size();
    std::vector<double> sum(k);
    std::vector<std::size_t> count(k);
    for (int it = 0; it < opts.max_iterations; ++it) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        for (double x : values) {
            const auto c = nearest(x, centers);
            sum[c] += x;
            ++count[c];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) continue;  // empty cluster keeps its center
            const double next = sum[c] / static_cast<double>(count[c]);
            shift = std::max(shift, std::abs(next - centers[c]));
            centers[c] = next;
        }
        if (shift < opts.tolerance) break;
    }
    double wcss = 0.0;
    for (double x : values) {
        const double d = x - centers[nearest(x, centers)];
        wcss += d * d;
    }
    return wcss;
}

DimensionPartition fallback_partition() {
    DimensionPartition part;
    for (std::size_t l = 0; l < kLabelCount; ++l) {
        part[l] = {static_cast<double>(l) / static_cast<double>(kLabelCount - 1), 0.1, kLabels[l]};
    }
    return part;
}

}  // namespace

double membership(const MembershipFunction& mf, double x) {
    const double z = (x - mf.center) / mf.sigma;
    return std::max(std::exp(-0.5 * z * z), std::numeric_limits<double>::min());
}

DimensionPartition fit_partition(std::span<const double> values, std::uint64_t seed,
                                 const KMeansOptions& opts) {
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < kLabelCount) return fallback_partition();

    std::mt19937_64 rng(seed);
    std::vector<double> best;
    double best_wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        auto centers = seed_centers(values, kLabelCount, rng);
        const double wcss = lloyd(values, centers, opts);
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best = std::move(centers);
        }
    }
    std::sort(best.begin(), best.end());

    std::array<double, kLabelCount> sum{}, sq{};
    std::array<std::size_t, kLabelCount> count{};
    for (double x : values) {
        const auto c = nearest(x, best);
        sum[c] += x;
        ++count[c];
    }
    for (double x : values) {
        const auto c = nearest(x, best);
        const double d = x - sum[c] / static_cast<double>(count[c]);
        sq[c] += d * d;
    }

    DimensionPartition part;
    for (std::size_t c = 0; c < kLabelCount; ++c) {
        const double sigma =
            count[c] ? std::sqrt(sq[c] / static_cast<double>(count[c])) : kSigmaMin;
        part[c] = {best[c], std::max(sigma, kSigmaMin), kLabels[c]};
    }
    return part;
}

FuzzyPartition fit_partitions(const FeatureMatrix& features, std::uint64_t seed,
                              const KMeansOptions& opts) {
    FuzzyPartition p;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        p.dims[k] = fit_partition(features.column(k), seed + k, opts);
    }
    return p;
}

double within_cluster_ss(std::span<const double> values, const DimensionPartition& part) {
    std::array<double, kLabelCount> centers{};
    for (std::size_t c = 0; c < kLabelCount; ++c) centers[c] = part[c].center;
    double total = 0.0;
    for (double x : values) {
        const double d = x - centers[nearest(x, centers)];
        total += d * d;
    }
    return total;
}

FuzzifiedInput fuzzify(const FeatureMatrix& features, const FuzzyPartition& partition) {
    FuzzifiedInput out;
    const std::size_t n = features.rows();
    out.memberships.resize(n);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            std::size_t arg = 0;
            double best = -1.0;
            for (std::size_t l = 0; l < kLabelCount; ++l) {
                const double m = membership(partition.dims[k][l], features.normalized[i][k]);
                out.memberships[i][k * kLabelCount + l] = m;
                if (m > best) {
                    best = m;
                    arg = l;
                }
            }
            out.labels[i][k] = kLabels[arg];
        }
    }
    return out;
}

nlohmann::json to_json(const FuzzyPartition& partition) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        auto arr = nlohmann::json::array();
        for (const auto& mf : partition.dims[k]) {
            arr.push_back({{"label", std::string(short_name(mf.label))},
                           {"center", mf.center},
                           {"sigma", mf.sigma}});
        }
        j[kDimNames[k]] = std::move(arr);
    }
    return j;
}

FuzzyPartition partition_from_json(const nlohmann::json& j) {
    FuzzyPartition p;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const auto& arr = j.at(kDimNames[k]);
        if (arr.size() != kLabelCount) throw std::runtime_error("partition needs 5 functions");
        for (std::size_t l = 0; l < kLabelCount; ++l) {
            const auto label = parse_label(arr[l].at("label").get<std::string>());
            if (!label) throw std::runtime_error("unknown label in partition");
            p.dims[k][l] = {arr[l].at("center").get<double>(), arr[l].at("sigma").get<double>(),
                            *label};
        }
    }
    return p;
}

}  // namespace vne
