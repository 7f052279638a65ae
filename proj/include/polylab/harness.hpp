#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polylab/core.hpp"

namespace polylab::harness {

// Everything a run needs; flags override config-file values field by field.
struct ExperimentConfig {
    std::string op;
    std::string walk = "default";
    long N = 256;
    double theta = 0.0;
    double t = 0.5;
    std::string phi = "gaussian(0,0,0.25)";
    std::vector<std::string> psis = {"const(1)"};
    long replicas = 100;
    std::uint64_t seed = 1;
    std::vector<double> eps_list;
    std::vector<double> lambda_list;
    std::array<double, 4> region{-2.0, 2.0, -2.0, 2.0};
    double s = 0.0;          // window start (peaks)
    int nmax = 256;          // kernel/renewal horizon
    int n_spatial = 0;
    double a = 0.25;         // gaussian variance for the continuum oracles
    std::string out_dir = "out";
    int threads = 0;         // 0 = hardware
    double trunc = 1e-40;
    bool check = false;

    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json() const;      // canonical serialization
    std::uint64_t digest() const;     // FNV-1a over the canonical form
};

std::uint64_t fnv1a64(const std::string& s);

// Format a double so it round-trips exactly.
std::string format_double(double v);

// Atomic write: temp file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

struct CsvWriter {
    std::string header;
    std::vector<std::string> rows;

    explicit CsvWriter(std::string header_line) : header(std::move(header_line)) {}
    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& values);
    void save(const std::string& path) const;
};

// Metadata sidecar: config digest, coupling record, tool version, wall time.
void write_meta(const std::string& path, const ExperimentConfig& cfg,
                const std::string& extra_json_object);

// Run fn(replica) for replica = 0..R-1 on `threads` workers.  Results must be
// written into per-replica slots by the callee; the schedule never affects
// outputs.
void for_each_replica(long replicas, int threads, const std::function<void(long)>& fn);

inline constexpr const char* kToolVersion = "polylab 0.1.0";

}  // namespace polylab::harness
