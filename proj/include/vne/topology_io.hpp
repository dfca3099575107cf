#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vne/graph.hpp"

namespace vne {

/// Environment shape. Defaults reproduce the 100-node / 600-link / 4-domain
/// substrate and 2000-request workload.
struct GeneratorConfig {
    std::uint64_t seed = 1;
    int substrate_nodes = 100;
    int substrate_links = 600;
    int domains = 4;
    std::pair<int, int> node_resource_range{50, 100};
    std::pair<int, int> link_resource_range{50, 100};
    int vnr_count = 2000;
    std::pair<int, int> vnr_nodes_range{2, 10};
    std::pair<int, int> vnr_resource_range{1, 50};
    double vlink_probability = 0.5;
    double mean_interarrival_s = 20.0;
    double mean_lifetime_s = 1000.0;
};

/// Config that cannot produce a valid environment (too many links for a simple
/// graph, too few to connect it, empty ranges, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& reason);

    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

void validate(const GeneratorConfig& cfg);

SubstrateNetwork generate_substrate(const GeneratorConfig& cfg);
std::vector<VirtualNetworkRequest> generate_vnrs(const GeneratorConfig& cfg);

void write_substrate(std::ostream& out, const SubstrateNetwork& net);
SubstrateNetwork read_substrate(std::istream& in, const std::string& source = "<substrate>");

void write_vnr(std::ostream& out, const VirtualNetworkRequest& vnr);
VirtualNetworkRequest read_vnr(std::istream& in, const std::string& source = "<vnr>");

std::string to_text(const SubstrateNetwork& net);
std::string to_text(const VirtualNetworkRequest& vnr);

/// On-disk environment: `<dir>/substrate.txt` plus `<dir>/vnrs/vnr_NNNN.txt`.
struct Environment {
    SubstrateNetwork substrate;
    std::vector<VirtualNetworkRequest> vnrs;
};

void save_environment(const std::filesystem::path& dir, const Environment& env);
Environment load_environment(const std::filesystem::path& dir);

}  // namespace vne
