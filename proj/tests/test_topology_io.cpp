#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <queue>
#include <sstream>

#include "vne/topology_io.hpp"

using namespace vne;

namespace {

bool is_connected(const SubstrateNetwork& net) {
    std::vector<bool> seen(net.node_count(), false);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (LinkId l : net.incident(u)) {
            const NodeId w = net.link(l).other(u);
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
        }
    }
    return count == net.node_count();
}

std::size_t parse_error_line(const std::string& text, bool substrate) {
    std::istringstream in(text);
    try {
        if (substrate) {
            read_substrate(in, "fixture.txt");
        } else {
            read_vnr(in, "fixture.txt");
        }
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("default substrate shape") {
    GeneratorConfig cfg;
    cfg.seed = 7;
    auto net = generate_substrate(cfg);
    CHECK(net.node_count() == 100);
    CHECK(net.link_count() == 600);
    CHECK(net.domain_count() == 4);
    CHECK(is_connected(net));
    for (const auto& n : net.nodes()) {
        CHECK(n.cpu_capacity >= 50);
        CHECK(n.cpu_capacity <= 100);
        CHECK(n.cpu_capacity == std::floor(n.cpu_capacity));
        CHECK(n.cpu_residual == n.cpu_capacity);
        const int quadrant = (n.location.x >= 0.5 ? 1 : 0) + (n.location.y >= 0.5 ? 2 : 0);
        CHECK(n.domain == quadrant);
    }
    std::size_t inter = 0;
    for (const auto& l : net.links()) {
        CHECK(l.bw_capacity >= 50);
        CHECK(l.bw_capacity <= 100);
        const bool cross = net.node(l.u).domain != net.node(l.v).domain;
        CHECK((l.kind == LinkKind::inter_domain) == cross);
        inter += cross;
    }
    CHECK(inter > 0);
}

TEST_CASE("minimal two-node substrate") {
    GeneratorConfig cfg;
    cfg.substrate_nodes = 2;
    cfg.substrate_links = 1;
    auto net = generate_substrate(cfg);
    CHECK(net.link_count() == 1);
    CHECK(is_connected(net));
}

TEST_CASE("generation is a pure function of the config") {
    GeneratorConfig cfg;
    cfg.seed = 42;
    CHECK(to_text(generate_substrate(cfg)) == to_text(generate_substrate(cfg)));
    auto a = generate_vnrs(cfg), b = generate_vnrs(cfg);
    CHECK(a == b);
    cfg.seed = 43;
    CHECK(to_text(generate_substrate(cfg)) != to_text(generate_substrate({})));
}

TEST_CASE("unsatisfiable configs are rejected") {
    GeneratorConfig cfg;
    cfg.substrate_nodes = 10;
    cfg.substrate_links = 46;  // more than 10 * 9 / 2
    CHECK_THROWS_AS(generate_substrate(cfg), ConfigError);
    cfg.substrate_links = 8;  // cannot span 10 nodes
    CHECK_THROWS_AS(generate_substrate(cfg), ConfigError);
    cfg = {};
    cfg.node_resource_range = {60, 50};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.vnr_nodes_range = {1, 4};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.mean_interarrival_s = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("workload shape") {
    GeneratorConfig cfg;
    auto vnrs = generate_vnrs(cfg);
    REQUIRE(vnrs.size() == 2000);
    double gaps = 0.0, life = 0.0, prev = 0.0;
    for (const auto& v : vnrs) {
        CHECK_NOTHROW(validate(v));
        CHECK(v.t_start >= prev);
        CHECK(v.vnodes.size() >= 2);
        CHECK(v.vnodes.size() <= 10);
        for (const auto& n : v.vnodes) CHECK((n.cpu_demand >= 1 && n.cpu_demand <= 50));
        for (const auto& l : v.vlinks) CHECK((l.bw_demand >= 1 && l.bw_demand <= 50));
        gaps += v.t_start - prev;
        life += v.t_end - v.t_start;
        prev = v.t_start;
    }
    CHECK(gaps / 2000.0 == doctest::Approx(20.0).epsilon(0.05));
    CHECK(life / 2000.0 == doctest::Approx(1000.0).epsilon(0.05));
}

TEST_CASE("ten-node requests carry about n(n-1)/4 links") {
    GeneratorConfig cfg;
    cfg.vnr_count = 10000;
    cfg.vnr_nodes_range = {10, 10};
    double links = 0.0;
    for (const auto& v : generate_vnrs(cfg)) links += double(v.vlinks.size());
    CHECK(links / 10000.0 == doctest::Approx(22.5).epsilon(0.10));
}

TEST_CASE("substrate and request files round-trip") {
    GeneratorConfig cfg;
    cfg.seed = 3;
    auto net = generate_substrate(cfg);
    std::istringstream in(to_text(net));
    auto back = read_substrate(in);
    CHECK(back == net);
    CHECK(to_text(back) == to_text(net));

    for (const auto& v : generate_vnrs(cfg)) {
        std::istringstream vin(to_text(v));
        CHECK(read_vnr(vin) == v);
    }
}

TEST_CASE("hand-written three-node substrate") {
    std::istringstream in(
        "3 2 2\n"
        "0 0 0.1 0.2 50\n"
        "1 0 0.4 0.2 75\n"
        "\n"
        "2 1 0.9 0.9 100\r\n"
        "0 1 60\n"
        "1 2 55.5\n");
    auto net = read_substrate(in);
    REQUIRE(net.node_count() == 3);
    REQUIRE(net.link_count() == 2);
    CHECK(net.domain_count() == 2);
    CHECK(net.node(1).cpu_capacity == 75);
    CHECK(net.node(2).domain == 1);
    CHECK(net.node(2).location == Point{0.9, 0.9});
    CHECK(net.link(1).bw_residual == 55.5);
    CHECK(net.link(0).kind == LinkKind::intra_domain);
    CHECK(net.link(1).kind == LinkKind::inter_domain);
}

TEST_CASE("parse errors cite the offending line") {
    const std::string head = "3 2 1\n0 0 0 0 50\n1 0 0 0 50\n2 0 0 0 50\n";
    CHECK(parse_error_line(head + "0 1 5\na b\n", true) == 6);
    CHECK(parse_error_line(head + "0 1 5\n1 2\n", true) == 6);
    CHECK(parse_error_line(head + "0 1 5\n1 1 5\n", true) == 6);
    CHECK(parse_error_line(head + "0 1 5\n", true) == 5);  // missing link line
    CHECK(parse_error_line("3 2 1\n0 0 0 0 50\n5 0 0 0 50\n", true) == 3);
    CHECK(parse_error_line(head + "0 1 5\n1 2 5\n1 2 5\n", true) == 7);
    CHECK(parse_error_line("0 0 10 2\n0 5\n1 x\n", false) == 3);
    CHECK(parse_error_line("0 0 10 2\n0 5\n1 5\n0 1\n", false) == 4);
    CHECK(parse_error_line("0 10 10 2\n0 5\n1 5\n", false) == 3);  // t_end == t_start

    std::istringstream in(head + "0 1 5\na b\n");
    try {
        read_substrate(in, "sub.txt");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).rfind("sub.txt:6: ", 0) == 0);
    }
}

TEST_CASE("environment directory round-trip") {
    namespace fs = std::filesystem;
    GeneratorConfig cfg;
    cfg.substrate_nodes = 12;
    cfg.substrate_links = 20;
    cfg.vnr_count = 15;
    Environment env{generate_substrate(cfg), generate_vnrs(cfg)};
    const auto dir = fs::temp_directory_path() / "vne_env_roundtrip";
    fs::remove_all(dir);
    save_environment(dir, env);
    CHECK(fs::exists(dir / "vnrs" / "vnr_0014.txt"));
    auto back = load_environment(dir);
    CHECK(back.substrate == env.substrate);
    CHECK(back.vnrs == env.vnrs);
    fs::remove_all(dir);
}
