#include "polylab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace polylab::harness {

using nlohmann::json;

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    in >> j;
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("op", c.op);
    get("walk", c.walk);
    get("N", c.N);
    get("theta", c.theta);
    get("t", c.t);
    get("phi", c.phi);
    get("psis", c.psis);
    get("replicas", c.replicas);
    get("seed", c.seed);
    get("eps_list", c.eps_list);
    get("lambda_list", c.lambda_list);
    get("s", c.s);
    get("nmax", c.nmax);
    get("n_spatial", c.n_spatial);
    get("a", c.a);
    get("out_dir", c.out_dir);
    get("threads", c.threads);
    get("trunc", c.trunc);
    get("check", c.check);
    if (j.contains("region")) {
        auto r = j.at("region").get<std::vector<double>>();
        if (r.size() != 4) throw ConfigError("config: region needs 4 numbers");
        c.region = {r[0], r[1], r[2], r[3]};
    }
    return c;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["op"] = op;
    j["walk"] = walk;
    j["N"] = N;
    j["theta"] = theta;
    j["t"] = t;
    j["phi"] = phi;
    j["psis"] = psis;
    j["replicas"] = replicas;
    j["seed"] = seed;
    j["eps_list"] = eps_list;
    j["lambda_list"] = lambda_list;
    j["region"] = {region[0], region[1], region[2], region[3]};
    j["s"] = s;
    j["nmax"] = nmax;
    j["n_spatial"] = n_spatial;
    j["a"] = a;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    j["trunc"] = trunc;
    j["check"] = check;
    return j.dump(2);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t ExperimentConfig::digest() const {
    // out_dir and threads do not affect the results
    ExperimentConfig c = *this;
    c.out_dir.clear();
    c.threads = 0;
    return fnv1a64(c.to_json());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    rows.push_back(std::move(line));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += values[i];
    }
    rows.push_back(std::move(line));
}

void CsvWriter::save(const std::string& path) const {
    std::string content = header;
    content += '\n';
    for (const auto& r : rows) {
        content += r;
        content += '\n';
    }
    write_text_atomic(path, content);
}

void write_meta(const std::string& path, const ExperimentConfig& cfg,
                const std::string& extra_json_object) {
    json j = json::parse(cfg.to_json());
    json m;
    m["config"] = j;
    m["config_digest"] = cfg.digest();
    m["version"] = kToolVersion;
    if (!extra_json_object.empty()) m["result"] = json::parse(extra_json_object);
    write_text_atomic(path, m.dump(2) + "\n");
}

void for_each_replica(long replicas, int threads, const std::function<void(long)>& fn) {
    int nthreads = threads;
    if (nthreads <= 0) {
        if (const char* env = std::getenv("POLYLAB_THREADS")) nthreads = std::atoi(env);
    }
    if (nthreads <= 0) nthreads = int(std::thread::hardware_concurrency());
    nthreads = int(std::max<long>(1, std::min<long>(nthreads, replicas)));

    if (nthreads == 1) {
        for (long r = 0; r < replicas; ++r) fn(r);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex err_mu;
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const long r = next.fetch_add(1);
                if (r >= replicas) return;
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace polylab::harness
