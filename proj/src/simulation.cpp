#include "vne/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace vne {

std::size_t MetricsLedger::accepted() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.accepted; }));
}

double long_term_avg_revenue(const MetricsLedger& ledger, double t) {
    const double elapsed = t - ledger.origin;
    if (!(elapsed > 0.0)) return 0.0;
    double total = 0.0;
    for (const auto& r : ledger.records) {
        if (r.accepted && r.t_start <= t) total += r.revenue;
    }
    return total / elapsed;
}

double revenue_cost_ratio(const MetricsLedger& ledger, double t) {
    double rev = 0.0;
    double cst = 0.0;
    for (const auto& r : ledger.records) {
        if (r.accepted && r.t_start <= t) {
            rev += r.revenue;
            cst += r.cost;
        }
    }
    return cst > 0.0 ? rev / cst : 0.0;
}

double acceptance_rate(const MetricsLedger& ledger, double t) {
    std::size_t arrived = 0;
    std::size_t accepted = 0;
    for (const auto& r : ledger.records) {
        if (r.t_start > t) continue;
        ++arrived;
        if (r.accepted) ++accepted;
    }
    return arrived ? static_cast<double>(accepted) / static_cast<double>(arrived) : 0.0;
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size() || predicted.empty()) {
        throw std::invalid_argument("rmse: vectors must be nonempty and equally sized");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(predicted.size()));
}

double pearson(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size() || predicted.empty()) {
        throw std::invalid_argument("pearson: vectors must be nonempty and equally sized");
    }
    const double n = static_cast<double>(predicted.size());
    double my = 0.0, ma = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        my += predicted[i];
        ma += actual[i];
    }
    my /= n;
    ma /= n;
    double cov = 0.0, vy = 0.0, va = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double dy = predicted[i] - my;
        const double da = actual[i] - ma;
        cov += dy * da;
        vy += dy * dy;
        va += da * da;
    }
    if (!(vy > 0.0) || !(va > 0.0)) return 0.0;
    return std::clamp(cov / (std::sqrt(vy) * std::sqrt(va)), -1.0, 1.0);
}

DecisionAccuracy decision_accuracy(const MetricsLedger& ledger) {
    DecisionAccuracy acc;
    for (std::size_t i = 0; i < ledger.records.size(); ++i) {
        if (!ledger.records[i].accepted || i >= ledger.predicted.size()) continue;
        const auto& p = ledger.predicted[i];
        const auto actual = placement_distribution(p.size(), ledger.placements[i]);
        acc.phi += rmse(p, actual);
        acc.psi += pearson(p, actual);
        ++acc.samples;
    }
    if (acc.samples) {
        acc.phi /= static_cast<double>(acc.samples);
        acc.psi /= static_cast<double>(acc.samples);
    }
    return acc;
}

std::vector<double> sample_times(double origin, double start, double interval, double until) {
    if (!(interval > 0.0)) throw std::invalid_argument("sample interval must be positive");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double t = origin + start + static_cast<double>(k) * interval;
        if (t > until) break;
        out.push_back(t);
    }
    if (until >= origin + start && (out.empty() || out.back() < until)) out.push_back(until);
    return out;
}

TimeSeriesReport build_report(const MetricsLedger& ledger, std::span<const double> times) {
    TimeSeriesReport report;
    for (double t : times) {
        report.samples.push_back({t, long_term_avg_revenue(ledger, t),
                                  revenue_cost_ratio(ledger, t), acceptance_rate(ledger, t)});
    }
    return report;
}

SimulationResult run_simulation(SubstrateNetwork& substrate,
                                std::span<const VirtualNetworkRequest> vnrs,
                                EmbeddingPolicy& policy, Mode mode,
                                const SimulationOptions& options) {
    if (!std::is_sorted(vnrs.begin(), vnrs.end(),
                        [](const auto& a, const auto& b) { return a.t_start < b.t_start; })) {
        throw std::invalid_argument("run_simulation: requests must be ordered by arrival");
    }

    SimulationResult out;
    auto& ledger = out.ledger;
    ledger.origin = options.origin;
    ledger.records.reserve(vnrs.size());

    using Expiry = std::pair<double, std::size_t>;  // (t_end, record index)
    std::priority_queue<Expiry, std::vector<Expiry>, std::greater<>> expiries;
    std::vector<std::optional<Allocation>> live(vnrs.size());

    auto expire_until = [&](double t) {
        while (!expiries.empty() && expiries.top().first <= t) {
            const auto idx = expiries.top().second;
            expiries.pop();
            substrate.release(*live[idx]);
            live[idx].reset();
        }
    };

    for (std::size_t i = 0; i < vnrs.size(); ++i) {
        const auto& vnr = vnrs[i];
        expire_until(vnr.t_start);
        auto outcome = embed_vnr(substrate, vnr, policy, mode);
        const auto& r = outcome.result;
        ledger.records.push_back({vnr.vnr_id, vnr.t_start, vnr.t_end, r.accepted,
                                  r.accepted ? r.revenue : 0.0, r.accepted ? r.cost : 0.0});
        if (options.record_predictions) {
            ledger.predicted.push_back(std::move(outcome.probabilities));
            ledger.placements.push_back(r.accepted ? r.node_assignment : std::vector<NodeId>{});
        }
        if (outcome.loss) out.losses.push_back(*outcome.loss);
        if (outcome.allocation) {
            live[i] = std::move(outcome.allocation);
            expiries.emplace(vnr.t_end, i);
        }
    }
    if (options.release_at_end) expire_until(std::numeric_limits<double>::infinity());

    const double until = vnrs.empty() ? options.origin : vnrs.back().t_start;
    const auto times =
        sample_times(options.origin, options.sample_start, options.sample_interval, until);
    out.report = build_report(ledger, times);
    return out;
}

std::vector<IterationStats> train_agent(DnfsAgent& agent, const SubstrateNetwork& substrate,
                                        std::span<const VirtualNetworkRequest> vnrs,
                                        int iterations, double origin,
                                        const std::function<void(const IterationStats&)>& on_iteration) {
    std::vector<IterationStats> stats;
    auto policy = EmbeddingPolicy::dnfs(agent);
    SimulationOptions opts;
    opts.origin = origin;
    opts.record_predictions = false;
    const double end = vnrs.empty() ? origin : vnrs.back().t_start;
    for (int it = 1; it <= iterations; ++it) {
        SubstrateNetwork net = substrate;
        net.reset();
        const auto sim = run_simulation(net, vnrs, policy, Mode::train, opts);
        IterationStats s;
        s.iteration = it;
        s.avg_revenue = long_term_avg_revenue(sim.ledger, end);
        s.revenue_cost_ratio = revenue_cost_ratio(sim.ledger, end);
        s.acceptance_rate = acceptance_rate(sim.ledger, end);
        if (!sim.losses.empty()) {
            double total = 0.0;
            for (double l : sim.losses) total += l;
            s.mean_loss = total / static_cast<double>(sim.losses.size());
        }
        s.rules = agent.rules.size();
        stats.push_back(s);
        if (on_iteration) on_iteration(s);
    }
    return stats;
}

void write_report_csv(std::ostream& out, const TimeSeriesReport& report) {
    out << "t,avg_revenue,revenue_cost_ratio,acceptance_rate\n";
    for (const auto& s : report.samples) {
        out << fmt::format("{},{},{},{}\n", s.t, s.avg_revenue, s.revenue_cost_ratio,
                           s.acceptance_rate);
    }
}

void write_ledger_jsonl(std::ostream& out, const MetricsLedger& ledger) {
    for (const auto& r : ledger.records) {
        nlohmann::json j{{"vnr_id", r.vnr_id},   {"t_start", r.t_start}, {"t_end", r.t_end},
                         {"accepted", r.accepted}, {"revenue", r.revenue}, {"cost", r.cost}};
        out << j.dump() << '\n';
    }
}

void write_training_csv(std::ostream& out, std::span<const IterationStats> stats) {
    out << "iteration,avg_revenue,revenue_cost_ratio,acceptance_rate,mean_loss,rules\n";
    for (const auto& s : stats) {
        out << fmt::format("{},{},{},{},{},{}\n", s.iteration, s.avg_revenue,
                           s.revenue_cost_ratio, s.acceptance_rate, s.mean_loss, s.rules);
    }
}

}  // namespace vne
