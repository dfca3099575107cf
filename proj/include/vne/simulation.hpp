#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "vne/engine.hpp"

namespace vne {

struct VnrRecord {
    std::uint32_t vnr_id = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    bool accepted = false;
    double revenue = 0.0;  // zero unless accepted
    double cost = 0.0;     // zero unless accepted

    bool operator==(const VnrRecord&) const = default;
};

/// Per-request accounting in arrival order. `predicted` and `placements` are
/// parallel to `records` when predictions are recorded.
struct MetricsLedger {
    double origin = 0.0;  // time the workload's clock starts from
    std::vector<VnrRecord> records;
    std::vector<std::vector<double>> predicted;
    std::vector<std::vector<NodeId>> placements;  // empty for rejected requests

    std::size_t arrived() const { return records.size(); }
    std::size_t accepted() const;
};

/// Revenue of requests accepted by time T, divided by elapsed time T - origin.
double long_term_avg_revenue(const MetricsLedger& ledger, double t);
/// Total revenue over total cost of requests accepted by time T; 0 when no cost.
double revenue_cost_ratio(const MetricsLedger& ledger, double t);
/// Accepted over arrived among requests with t_start <= T; 0 before any arrival.
double acceptance_rate(const MetricsLedger& ledger, double t);

/// Root mean squared error between equally sized vectors.
double rmse(std::span<const double> predicted, std::span<const double> actual);
/// Pearson correlation; 0 when either vector has zero variance.
double pearson(std::span<const double> predicted, std::span<const double> actual);

struct DecisionAccuracy {
    double phi = 0.0;  // mean RMSE
    double psi = 0.0;  // mean Pearson correlation
    std::size_t samples = 0;
};

/// Averages RMSE and Pearson between each accepted request's predicted
/// probabilities and its realized placement distribution.
DecisionAccuracy decision_accuracy(const MetricsLedger& ledger);

struct TimeSample {
    double t = 0.0;
    double avg_revenue = 0.0;
    double revenue_cost_ratio = 0.0;
    double acceptance_rate = 0.0;
};

struct TimeSeriesReport {
    std::vector<TimeSample> samples;
};

struct SimulationOptions {
    double origin = 0.0;
    double sample_start = 22.0;     // first sample, relative to origin
    double sample_interval = 4000.0;
    bool release_at_end = true;     // expire every surviving request after the last arrival
    bool record_predictions = true;
};

struct SimulationResult {
    MetricsLedger ledger;
    TimeSeriesReport report;
    std::vector<double> losses;  // one per training step taken
};

/// origin + start + k * interval up to `until`, closed by a final sample at
/// `until` itself when it falls between grid points.
std::vector<double> sample_times(double origin, double start, double interval, double until);

TimeSeriesReport build_report(const MetricsLedger& ledger, std::span<const double> times);

/// Event loop over arrivals (in t_start order) and expiries of accepted
/// requests. Expiries at or before an arrival are processed first.
SimulationResult run_simulation(SubstrateNetwork& substrate,
                                std::span<const VirtualNetworkRequest> vnrs,
                                EmbeddingPolicy& policy, Mode mode,
                                const SimulationOptions& options = {});

struct IterationStats {
    int iteration = 0;
    double avg_revenue = 0.0;
    double revenue_cost_ratio = 0.0;
    double acceptance_rate = 0.0;
    double mean_loss = 0.0;
    std::size_t rules = 0;
};

/// Repeated training passes of a DNFS agent over the same workload, each on a
/// fresh copy of the substrate.
std::vector<IterationStats> train_agent(DnfsAgent& agent, const SubstrateNetwork& substrate,
                                        std::span<const VirtualNetworkRequest> vnrs,
                                        int iterations, double origin = 0.0,
                                        const std::function<void(const IterationStats&)>& on_iteration = {});

void write_report_csv(std::ostream& out, const TimeSeriesReport& report);
void write_ledger_jsonl(std::ostream& out, const MetricsLedger& ledger);
void write_training_csv(std::ostream& out, std::span<const IterationStats> stats);

}  // namespace vne
