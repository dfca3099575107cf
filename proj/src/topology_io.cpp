#include "vne/topology_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace vne {

ParseError::ParseError(std::string source, std::size_t line, const std::string& reason)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, reason)),
      source_(std::move(source)),
      line_(line) {}

namespace {

void check_range(const std::pair<int, int>& r, const char* name, int floor) {
    if (r.first > r.second) throw ConfigError(fmt::format("{}: empty range", name));
    if (r.first < floor) throw ConfigError(fmt::format("{}: lower bound below {}", name, floor));
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

int quadrant_domain(const Point& p, int domains) {
    if (domains == 4) return (p.x >= 0.5 ? 1 : 0) + (p.y >= 0.5 ? 2 : 0);
    return std::min(static_cast<int>(p.x * domains), domains - 1);
}

bool connected(std::size_t n, const std::vector<VirtualLink>& links) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = n;
    for (const auto& l : links) {
        auto a = find(l.a), b = find(l.b);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

// Line-oriented tokenizer that tracks line numbers for error reporting.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next non-blank line split into tokens; false at end of input.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            tokens.clear();
            std::istringstream ss(line);
            for (std::string tok; ss >> tok;) tokens.push_back(std::move(tok));
            if (!tokens.empty()) return true;
        }
        return false;
    }

    void expect(std::vector<std::string>& tokens, std::size_t count, const char* what) {
        if (!next(tokens)) fail(fmt::format("unexpected end of file, expected {}", what));
        if (tokens.size() != count) {
            fail(fmt::format("expected {} fields for {}, got {}", count, what, tokens.size()));
        }
    }

    template <typename T>
    T number(const std::string& tok, const char* what) {
        T value{};
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, value);
        if (ec != std::errc{} || ptr != end) {
            fail(fmt::format("invalid {} '{}'", what, tok));
        }
        return value;
    }

    [[noreturn]] void fail(const std::string& reason) const {
        throw ParseError(source_, line_no_, reason);
    }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

}  // namespace

void validate(const GeneratorConfig& cfg) {
    if (cfg.substrate_nodes < 1) throw ConfigError("substrate_nodes must be positive");
    if (cfg.substrate_links < 0) throw ConfigError("substrate_links must be nonnegative");
    if (cfg.domains < 1) throw ConfigError("domains must be positive");
    if (cfg.vnr_count < 0) throw ConfigError("vnr_count must be nonnegative");
    const auto n = static_cast<long long>(cfg.substrate_nodes);
    if (cfg.substrate_links < n - 1) {
        throw ConfigError(fmt::format("{} links cannot connect {} nodes", cfg.substrate_links, n));
    }
    if (cfg.substrate_links > n * (n - 1) / 2) {
        throw ConfigError(
            fmt::format("{} links exceed a simple graph on {} nodes", cfg.substrate_links, n));
    }
    check_range(cfg.node_resource_range, "node_resource_range", 0);
    check_range(cfg.link_resource_range, "link_resource_range", 0);
    check_range(cfg.vnr_nodes_range, "vnr_nodes_range", 2);
    check_range(cfg.vnr_resource_range, "vnr_resource_range", 1);
    if (!(cfg.vlink_probability > 0.0 && cfg.vlink_probability <= 1.0)) {
        throw ConfigError("vlink_probability must lie in (0, 1]");
    }
    if (!(cfg.mean_interarrival_s > 0.0) || !(cfg.mean_lifetime_s > 0.0)) {
        throw ConfigError("mean inter-arrival and lifetime must be positive");
    }
}

SubstrateNetwork generate_substrate(const GeneratorConfig& cfg) {
    validate(cfg);
    auto rng = stream_rng(cfg.seed, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> cpu(cfg.node_resource_range.first,
                                           cfg.node_resource_range.second);
    std::uniform_int_distribution<int> bw(cfg.link_resource_range.first,
                                          cfg.link_resource_range.second);

    SubstrateNetwork net(cfg.domains);
    const auto n = static_cast<std::size_t>(cfg.substrate_nodes);
    for (std::size_t i = 0; i < n; ++i) {
        Point p{unit(rng), unit(rng)};
        net.add_node(quadrant_domain(p, cfg.domains), p, cpu(rng));
    }

    // Random spanning tree first so the graph is connected, then uniformly
    // chosen extra pairs.
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        net.add_link(order[pick(rng)], order[i], bw(rng));
    }

    const auto remaining = static_cast<std::size_t>(cfg.substrate_links) - (n - 1);
    if (remaining > 0) {
        std::vector<std::pair<NodeId, NodeId>> pool;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = u + 1; v < n; ++v) {
                if (!net.find_link(u, v)) pool.emplace_back(u, v);
            }
        }
        for (std::size_t k = 0; k < remaining; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
            std::swap(pool[k], pool[pick(rng)]);
            net.add_link(pool[k].first, pool[k].second, bw(rng));
        }
    }
    return net;
}

std::vector<VirtualNetworkRequest> generate_vnrs(const GeneratorConfig& cfg) {
    validate(cfg);
    auto rng = stream_rng(cfg.seed, 2);
    std::exponential_distribution<double> gap(1.0 / cfg.mean_interarrival_s);
    std::exponential_distribution<double> life(1.0 / cfg.mean_lifetime_s);
    std::uniform_int_distribution<int> size(cfg.vnr_nodes_range.first, cfg.vnr_nodes_range.second);
    std::uniform_int_distribution<int> demand(cfg.vnr_resource_range.first,
                                              cfg.vnr_resource_range.second);
    std::bernoulli_distribution coin(cfg.vlink_probability);

    std::vector<VirtualNetworkRequest> out;
    out.reserve(static_cast<std::size_t>(cfg.vnr_count));
    double t = 0.0;
    for (int i = 0; i < cfg.vnr_count; ++i) {
        VirtualNetworkRequest vnr;
        vnr.vnr_id = static_cast<std::uint32_t>(i);
        t += gap(rng);
        vnr.t_start = t;
        double lifetime = life(rng);
        while (!(vnr.t_start + lifetime > vnr.t_start)) lifetime = life(rng);
        vnr.t_end = vnr.t_start + lifetime;

        const auto n = static_cast<std::uint32_t>(size(rng));
        for (std::uint32_t v = 0; v < n; ++v) vnr.vnodes.push_back({v, double(demand(rng))});
        do {
            vnr.vlinks.clear();
            for (std::uint32_t a = 0; a < n; ++a) {
                for (std::uint32_t b = a + 1; b < n; ++b) {
                    if (coin(rng)) vnr.vlinks.push_back({a, b, 0.0});
                }
            }
        } while (!connected(n, vnr.vlinks));
        for (auto& vl : vnr.vlinks) vl.bw_demand = demand(rng);
        out.push_back(std::move(vnr));
    }
    return out;
}

void write_substrate(std::ostream& out, const SubstrateNetwork& net) {
    out << fmt::format("{} {} {}\n", net.node_count(), net.link_count(), net.domain_count());
    for (const auto& n : net.nodes()) {
        out << fmt::format("{} {} {} {} {}\n", n.id, n.domain, n.location.x, n.location.y,
                           n.cpu_capacity);
    }
    for (const auto& l : net.links()) out << fmt::format("{} {} {}\n", l.u, l.v, l.bw_capacity);
}

SubstrateNetwork read_substrate(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    std::vector<std::string> tok;
    r.expect(tok, 3, "header 'N L D'");
    const auto n = r.number<std::uint32_t>(tok[0], "node count");
    const auto l = r.number<std::uint32_t>(tok[1], "link count");
    const auto d = r.number<int>(tok[2], "domain count");
    if (d < 1) r.fail("domain count must be positive");

    SubstrateNetwork net(d);
    for (std::uint32_t i = 0; i < n; ++i) {
        r.expect(tok, 5, "node line 'id domain x y cpu'");
        if (r.number<std::uint32_t>(tok[0], "node id") != i) {
            r.fail(fmt::format("node ids must be sequential, expected {}", i));
        }
        const int domain = r.number<int>(tok[1], "domain");
        const Point p{r.number<double>(tok[2], "x"), r.number<double>(tok[3], "y")};
        const double cpu = r.number<double>(tok[4], "cpu");
        try {
            net.add_node(domain, p, cpu);
        } catch (const GraphError& e) {
            r.fail(e.what());
        }
    }
    for (std::uint32_t i = 0; i < l; ++i) {
        r.expect(tok, 3, "link line 'u v bw'");
        const auto u = r.number<NodeId>(tok[0], "endpoint");
        const auto v = r.number<NodeId>(tok[1], "endpoint");
        const double bw = r.number<double>(tok[2], "bandwidth");
        try {
            net.add_link(u, v, bw);
        } catch (const GraphError& e) {
            r.fail(e.what());
        }
    }
    if (r.next(tok)) r.fail("trailing content after link section");
    return net;
}

void write_vnr(std::ostream& out, const VirtualNetworkRequest& vnr) {
    out << fmt::format("{} {} {} {}\n", vnr.vnr_id, vnr.t_start, vnr.t_end, vnr.vnodes.size());
    for (const auto& v : vnr.vnodes) out << fmt::format("{} {}\n", v.id, v.cpu_demand);
    for (const auto& l : vnr.vlinks) out << fmt::format("{} {} {}\n", l.a, l.b, l.bw_demand);
}

VirtualNetworkRequest read_vnr(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    std::vector<std::string> tok;
    r.expect(tok, 4, "header 'vnr_id t_start t_end n_v'");
    VirtualNetworkRequest vnr;
    vnr.vnr_id = r.number<std::uint32_t>(tok[0], "vnr id");
    vnr.t_start = r.number<double>(tok[1], "t_start");
    vnr.t_end = r.number<double>(tok[2], "t_end");
    const auto n = r.number<std::uint32_t>(tok[3], "vnode count");
    for (std::uint32_t i = 0; i < n; ++i) {
        r.expect(tok, 2, "vnode line 'vnode_id cpu'");
        vnr.vnodes.push_back(
            {r.number<std::uint32_t>(tok[0], "vnode id"), r.number<double>(tok[1], "cpu")});
    }
    while (r.next(tok)) {
        if (tok.size() != 3) {
            r.fail(fmt::format("expected 3 fields for vlink line 'u v bw', got {}", tok.size()));
        }
        vnr.vlinks.push_back({r.number<std::uint32_t>(tok[0], "endpoint"),
                              r.number<std::uint32_t>(tok[1], "endpoint"),
                              r.number<double>(tok[2], "bandwidth")});
    }
    try {
        validate(vnr);
    } catch (const GraphError& e) {
        r.fail(e.what());
    }
    return vnr;
}

std::string to_text(const SubstrateNetwork& net) {
    std::ostringstream ss;
    write_substrate(ss, net);
    return ss.str();
}

std::string to_text(const VirtualNetworkRequest& vnr) {
    std::ostringstream ss;
    write_vnr(ss, vnr);
    return ss.str();
}

void save_environment(const std::filesystem::path& dir, const Environment& env) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "vnrs");
    {
        std::ofstream out(dir / "substrate.txt", std::ios::binary);
        write_substrate(out, env.substrate);
        if (!out) throw std::runtime_error("failed writing " + (dir / "substrate.txt").string());
    }
    for (const auto& vnr : env.vnrs) {
        const auto path = dir / "vnrs" / fmt::format("vnr_{:04}.txt", vnr.vnr_id);
        std::ofstream out(path, std::ios::binary);
        write_vnr(out, vnr);
        if (!out) throw std::runtime_error("failed writing " + path.string());
    }
}

Environment load_environment(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    Environment env;
    {
        const auto path = dir / "substrate.txt";
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        env.substrate = read_substrate(in, path.string());
    }
    std::vector<fs::path> files;
    if (fs::exists(dir / "vnrs")) {
        for (const auto& entry : fs::directory_iterator(dir / "vnrs")) {
            if (entry.path().extension() == ".txt") files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        env.vnrs.push_back(read_vnr(in, f.string()));
    }
    std::stable_sort(env.vnrs.begin(), env.vnrs.end(),
                     [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
    return env;
}

}  // namespace vne
