#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "vne/simulation.hpp"
#include "vne/topology_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vne;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitInfeasible = 4;
constexpr const char* kCheckpointFormat = "vne-checkpoint/1";

/// Malformed or inconsistent input from the operator.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    GeneratorConfig generator;
    TrainConfig train;
    DnfsOptions dnfs;
    NodeRankParams noderank;
};

std::pair<int, int> read_range(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2) throw UsageError(fmt::format("{} must be [low, high]", key));
    return {j[0].get<int>(), j[1].get<int>()};
}

Settings load_settings(const std::string& path) {
    Settings s;
    if (path.empty()) return s;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("{}: {}", path, e.what()));
    }
    if (!j.is_object()) throw UsageError(path + ": config must be a JSON object");

    auto& g = s.generator;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "seed") g.seed = s.train.seed = v.get<std::uint64_t>();
            else if (key == "substrate_nodes") g.substrate_nodes = v.get<int>();
            else if (key == "substrate_links") g.substrate_links = v.get<int>();
            else if (key == "domains") g.domains = v.get<int>();
            else if (key == "node_resource_range") g.node_resource_range = read_range(v, "node_resource_range");
            else if (key == "link_resource_range") g.link_resource_range = read_range(v, "link_resource_range");
            else if (key == "vnr_count") g.vnr_count = v.get<int>();
            else if (key == "vnr_nodes_range") g.vnr_nodes_range = read_range(v, "vnr_nodes_range");
            else if (key == "vnr_resource_range") g.vnr_resource_range = read_range(v, "vnr_resource_range");
            else if (key == "vlink_probability") g.vlink_probability = v.get<double>();
            else if (key == "mean_interarrival_s") g.mean_interarrival_s = v.get<double>();
            else if (key == "mean_lifetime_s") g.mean_lifetime_s = v.get<double>();
            else if (key == "learning_rate") s.train.learning_rate = v.get<double>();
            else if (key == "max_iterations") s.train.max_iterations = v.get<int>();
            else if (key == "target_mode") {
                const auto m = v.get<std::string>();
                if (m == "one_hot") s.train.target_mode = TargetMode::one_hot;
                else if (m == "self_scores") s.train.target_mode = TargetMode::self_scores;
                else throw UsageError("target_mode must be one_hot or self_scores");
            } else if (key == "normalization") {
                const auto m = v.get<std::string>();
                if (m == "sum") s.dnfs.scoring.normalization = Normalization::sum;
                else if (m == "exponential") s.dnfs.scoring.normalization = Normalization::exponential;
                else throw UsageError("normalization must be sum or exponential");
            } else if (key == "freeze_partition") s.dnfs.freeze_partition = v.get<bool>();
            else if (key == "noderank_epsilon") s.noderank.epsilon = v.get<double>();
            else if (key == "noderank_max_hop") s.noderank.max_hop = v.get<int>();
            else if (key == "noderank_p_jump") s.noderank.p_jump = v.get<double>();
            else if (key == "noderank_p_forward") s.noderank.p_forward = v.get<double>();
            else throw UsageError(fmt::format("{}: unknown key '{}'", path, key));
        }
    } catch (const json::type_error& e) {
        throw UsageError(fmt::format("{}: {}", path, e.what()));
    }
    return s;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

json options_json(const DnfsAgent& agent) {
    return {{"normalization", agent.options.scoring.normalization == Normalization::sum ? "sum" : "exponential"},
            {"freeze_partition", agent.options.freeze_partition},
            {"partition_seed", agent.options.partition_seed},
            {"learning_rate", agent.train.learning_rate},
            {"target_mode", agent.train.target_mode == TargetMode::one_hot ? "one_hot" : "self_scores"}};
}

void save_checkpoint(const fs::path& p, const DnfsAgent& agent) {
    json j{{"format", kCheckpointFormat},
           {"options", options_json(agent)},
           {"network", to_json(agent.network)},
           {"rules", to_json(agent.rules)},
           {"partition", agent.partition ? to_json(*agent.partition) : json(nullptr)}};
    open_out(p) << j.dump(1) << '\n';
}

DnfsAgent load_checkpoint(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw UsageError("cannot open checkpoint " + p.string());
    try {
        const auto j = json::parse(in);
        if (j.value("format", "") != kCheckpointFormat) {
            throw UsageError(p.string() + ": not a checkpoint");
        }
        DnfsAgent agent;
        const auto& o = j.at("options");
        agent.options.scoring.normalization =
            o.at("normalization") == "sum" ? Normalization::sum : Normalization::exponential;
        agent.options.freeze_partition = o.at("freeze_partition").get<bool>();
        agent.options.partition_seed = o.at("partition_seed").get<std::uint64_t>();
        agent.train.learning_rate = o.at("learning_rate").get<double>();
        agent.train.target_mode =
            o.at("target_mode") == "one_hot" ? TargetMode::one_hot : TargetMode::self_scores;
        agent.network = network_from_json(j.at("network"));
        agent.rules = rulebase_from_json(j.at("rules"));
        if (!j.at("partition").is_null()) agent.partition = partition_from_json(j.at("partition"));
        return agent;
    } catch (const json::exception& e) {
        throw UsageError(fmt::format("{}: {}", p.string(), e.what()));
    }
}

/// Requests after the training half, timed from the last training arrival.
struct TestSplit {
    std::span<const VirtualNetworkRequest> vnrs;
    double origin = 0.0;
};

TestSplit test_split(const std::vector<VirtualNetworkRequest>& vnrs) {
    std::span<const VirtualNetworkRequest> all(vnrs);
    const auto half = all.size() / 2;
    if (half == 0) throw UsageError("environment needs at least two requests");
    return {all.subspan(half), all[half - 1].t_start};
}

std::span<const VirtualNetworkRequest> train_split(const std::vector<VirtualNetworkRequest>& vnrs) {
    return std::span<const VirtualNetworkRequest>(vnrs).subspan(0, vnrs.size() / 2);
}

Mode parse_mode(const std::string& m) { return m == "train" ? Mode::train : Mode::eval; }

struct PolicyRun {
    std::string name;
    SimulationResult result;
};

PolicyRun run_policy(PolicyKind kind, const Environment& env, const Settings& settings,
                     std::optional<DnfsAgent>& agent, Mode mode) {
    const auto split = test_split(env.vnrs);
    SimulationOptions opt;
    opt.origin = split.origin;
    auto policy = kind == PolicyKind::dnfs       ? EmbeddingPolicy::dnfs(*agent)
                  : kind == PolicyKind::noderank ? EmbeddingPolicy::noderank(settings.noderank)
                                                 : EmbeddingPolicy::nrm();
    auto net = env.substrate;
    return {std::string(policy_name(kind)), run_simulation(net, split.vnrs, policy, mode, opt)};
}

json accuracy_json(const DecisionAccuracy& a) {
    return {{"phi", a.phi}, {"psi", a.psi}, {"samples", a.samples}};
}

int cmd_generate(const Settings& s, const fs::path& out) {
    validate(s.generator);
    Environment env{generate_substrate(s.generator), generate_vnrs(s.generator)};
    save_environment(out, env);
    std::size_t inter = 0;
    for (const auto& l : env.substrate.links()) inter += l.kind == LinkKind::inter_domain;
    fmt::print("wrote {}: {} nodes, {} links ({} inter-domain), {} requests\n", out.string(),
               env.substrate.node_count(), env.substrate.link_count(), inter, env.vnrs.size());
    return 0;
}

int cmd_train(const Settings& s, const fs::path& env_dir, const fs::path& out) {
    s.train.validate();
    const auto env = load_environment(env_dir);
    auto agent = DnfsAgent::fresh(s.train.seed, s.dnfs, s.train);
    const auto train = train_split(env.vnrs);
    fs::create_directories(out);
    const auto stats = train_agent(agent, env.substrate, train, s.train.max_iterations, 0.0,
                                   [](const IterationStats& it) {
                                       fmt::print("iteration {:>3}: revenue {:.3f} r/c {:.3f} acceptance {:.3f} loss {:.4f} rules {}\n",
                                                  it.iteration, it.avg_revenue, it.revenue_cost_ratio,
                                                  it.acceptance_rate, it.mean_loss, it.rules);
                                       std::fflush(stdout);
                                   });
    save_checkpoint(out / "checkpoint.json", agent);
    auto csv = open_out(out / "training.csv");
    write_training_csv(csv, stats);
    open_out(out / "rules.txt") << render_table(agent.rules);
    open_out(out / "rules.json") << to_json(agent.rules).dump(1) << '\n';
    fmt::print("trained on {} requests; wrote checkpoint, rules and curves to {}\n", train.size(),
               out.string());
    return 0;
}

int cmd_evaluate(const Settings& s, const fs::path& env_dir, const std::string& policy_arg,
                 const std::string& checkpoint, Mode mode, const fs::path& out) {
    const auto kind = parse_policy(policy_arg);
    if (!kind) throw UsageError("unknown policy " + policy_arg);
    const auto env = load_environment(env_dir);
    std::optional<DnfsAgent> agent;
    if (*kind == PolicyKind::dnfs) {
        if (checkpoint.empty()) throw UsageError("--checkpoint is required for the dnfs policy");
        agent = load_checkpoint(checkpoint);
    }
    const auto run = run_policy(*kind, env, s, agent, mode);
    fs::create_directories(out);
    auto csv = open_out(out / "report.csv");
    write_report_csv(csv, run.result.report);
    auto jl = open_out(out / "ledger.jsonl");
    write_ledger_jsonl(jl, run.result.ledger);
    const auto acc = decision_accuracy(run.result.ledger);
    json summary = accuracy_json(acc);
    summary["policy"] = run.name;
    open_out(out / "accuracy.json") << summary.dump(1) << '\n';
    const auto& last = run.result.report.samples.back();
    fmt::print("{}: acceptance {:.4f} revenue {:.4f} r/c {:.4f} phi {:.4f} psi {:.4f}\n", run.name,
               last.acceptance_rate, last.avg_revenue, last.revenue_cost_ratio, acc.phi, acc.psi);
    if (mode == Mode::train && agent) save_checkpoint(out / "checkpoint.json", *agent);
    return 0;
}

int cmd_compare(const Settings& s, const fs::path& env_dir, std::vector<std::string> names,
                const std::string& checkpoint, const fs::path& out) {
    if (names.empty()) {
        names = {"noderank", "nrm"};
        if (!checkpoint.empty()) names.insert(names.begin(), "dnfs");
    }
    std::map<std::string, PolicyKind> kinds;  // ordered by name
    for (const auto& n : names) {
        const auto k = parse_policy(n);
        if (!k) throw UsageError("unknown policy " + n);
        kinds[n] = *k;
    }
    const auto env = load_environment(env_dir);
    std::vector<PolicyRun> runs;
    for (const auto& [name, kind] : kinds) {
        std::optional<DnfsAgent> agent;
        if (kind == PolicyKind::dnfs) {
            if (checkpoint.empty()) throw UsageError("--checkpoint is required for the dnfs policy");
            agent = load_checkpoint(checkpoint);
        }
        runs.push_back(run_policy(kind, env, s, agent, Mode::eval));
    }

    fs::create_directories(out);
    auto csv = open_out(out / "compare.csv");
    csv << "t";
    for (const auto& r : runs) {
        csv << fmt::format(",{0}_avg_revenue,{0}_revenue_cost_ratio,{0}_acceptance_rate", r.name);
    }
    csv << '\n';
    const auto& grid = runs.front().result.report.samples;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << fmt::format("{}", grid[i].t);
        for (const auto& r : runs) {
            const auto& x = r.result.report.samples[i];
            csv << fmt::format(",{},{},{}", x.avg_revenue, x.revenue_cost_ratio, x.acceptance_rate);
        }
        csv << '\n';
    }

    auto table = open_out(out / "accuracy.csv");
    table << "policy,phi,psi,samples\n";
    fmt::print("{:<10} {:>10} {:>10} {:>10} {:>8} {:>8}\n", "policy", "acceptance", "revenue", "r/c",
               "phi", "psi");
    for (const auto& r : runs) {
        const auto acc = decision_accuracy(r.result.ledger);
        table << fmt::format("{},{},{},{}\n", r.name, acc.phi, acc.psi, acc.samples);
        const auto& last = r.result.report.samples.back();
        fmt::print("{:<10} {:>10.4f} {:>10.4f} {:>10.4f} {:>8.4f} {:>8.4f}\n", r.name,
                   last.acceptance_rate, last.avg_revenue, last.revenue_cost_ratio, acc.phi, acc.psi);
    }
    return 0;
}

int cmd_rules(const std::string& source, std::size_t limit, const fs::path& out) {
    RuleBase rb;
    std::optional<FuzzyPartition> partition;
    std::ifstream probe(source);
    if (!probe) throw UsageError("cannot open " + source);
    json j;
    try {
        j = json::parse(probe);
    } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("{}: {}", source, e.what()));
    }
    if (j.is_object() && j.value("format", "") == kCheckpointFormat) {
        const auto agent = load_checkpoint(source);
        rb = agent.rules;
        partition = agent.partition;
    } else {
        try {
            rb = rulebase_from_json(j);
        } catch (const json::exception& e) {
            throw UsageError(fmt::format("{}: {}", source, e.what()));
        }
    }
    const auto table = render_table(rb, limit);
    std::cout << table;
    if (!out.empty()) {
        fs::create_directories(out);
        open_out(out / "rules.txt") << table;
        open_out(out / "rules.json") << to_json(rb).dump(1) << '\n';
        if (partition) open_out(out / "partition.json") << to_json(*partition).dump(1) << '\n';
    }
    const auto mono = resource_monotonicity(rb);
    std::cerr << fmt::format("{} rules, resource monotonicity {}/{}\n", rb.size(), mono.ordered,
                             mono.pairs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual network embedding with a neuro-fuzzy node scorer"};
    app.require_subcommand(1);

    std::string config, env_dir, out, policy = "nrm", mode = "eval", checkpoint;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<double> lr;
    std::vector<std::string> policies;
    std::size_t limit = 0;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "overrides the config seed");
    };

    auto* gen = app.add_subcommand("generate", "generate a substrate and request workload");
    add_config(gen);
    gen->add_option("--out", out, "environment directory")->required();

    auto* train = app.add_subcommand("train", "train the DNFS policy on the first half of the workload");
    add_config(train);
    train->add_option("--env", env_dir, "environment directory")->required()->check(CLI::ExistingDirectory);
    train->add_option("--iterations", iterations, "training passes");
    train->add_option("--lr", lr, "learning rate");
    train->add_option("--out", out, "output directory")->required();

    auto* eval = app.add_subcommand("evaluate", "run one policy on the second half of the workload");
    add_config(eval);
    eval->add_option("--env", env_dir, "environment directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--policy", policy, "policy")->check(CLI::IsMember({"dnfs", "noderank", "nrm"}));
    eval->add_option("--mode", mode, "keep learning during evaluation")->check(CLI::IsMember({"train", "eval"}));
    eval->add_option("--checkpoint", checkpoint, "trained DNFS checkpoint");
    eval->add_option("--out", out, "output directory")->required();

    auto* cmp = app.add_subcommand("compare", "run several policies on the same workload");
    add_config(cmp);
    cmp->add_option("--env", env_dir, "environment directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("--policy", policies, "policies (repeatable)")->check(CLI::IsMember({"dnfs", "noderank", "nrm"}));
    cmp->add_option("--checkpoint", checkpoint, "trained DNFS checkpoint");
    cmp->add_option("--out", out, "output directory")->required();

    auto* rules = app.add_subcommand("rules", "print the rule base of a checkpoint or rules file");
    rules->add_option("source", checkpoint, "checkpoint.json or rules.json")->required();
    rules->add_option("--limit", limit, "print at most this many rules");
    rules->add_option("--out", out, "also write rules.txt, rules.json and partition.json here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        auto settings = load_settings(config);
        if (seed) settings.generator.seed = settings.train.seed = *seed;
        if (iterations) settings.train.max_iterations = *iterations;
        if (lr) settings.train.learning_rate = *lr;

        if (gen->parsed()) return cmd_generate(settings, out);
        if (train->parsed()) return cmd_train(settings, env_dir, out);
        if (eval->parsed()) return cmd_evaluate(settings, env_dir, policy, checkpoint, parse_mode(mode), out);
        if (cmp->parsed()) return cmd_compare(settings, env_dir, policies, checkpoint, out);
        return cmd_rules(checkpoint, limit, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: infeasible config: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
