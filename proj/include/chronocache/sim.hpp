#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chronocache/provider.hpp"
#include "chronocache/types.hpp"

namespace chronocache::sim {

// Deterministic 64-bit stream; the only randomness source in the simulator.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double next_unit(); // [0, 1), 53 bits
};

// Bounded Zipf-like sampler: P(k) proportional to (v + k)^(-s) over
// k in [0, n). Exact CDF inversion, deterministic given the rng stream.
class ZipfSampler {
public:
    ZipfSampler(double s, double v, std::uint32_t n);

    std::uint32_t operator()(SplitMix64& rng) const;
    double mass(std::uint32_t k) const; // exact normalized probability
    std::uint32_t size() const { return n_; }

private:
    std::uint32_t n_;
    double total_ = 0.0;
    std::vector<double> cdf_;
    std::vector<double> weight_;
};

enum class Mode { in_process, networked };

struct SimConfig {
    std::uint32_t m = 4;
    std::uint32_t n_users = 2048;
    std::uint32_t n_contents = 65535;
    std::uint32_t requests_per_user_per_period = 64;
    std::vector<std::uint32_t> capacities{4096, 8192, 16384};
    double zipf_s = 3.0;
    double zipf_v = 3000.0;
    std::uint32_t content_size_bytes = 1024;
    std::uint64_t seed = 1;
    Mode mode = Mode::in_process;
    // networked mode only; in-process runs build their own servers
    std::string sp_addr;
    std::string cs_addr;

    void validate() const; // throws std::invalid_argument
};

struct MetricsRow {
    std::uint32_t period = 0;
    std::uint32_t capacity = 0;
    std::uint64_t requests = 0;         // all attempts, revoked included
    std::uint64_t revoked_attempts = 0; // aborted locally, no traffic
    std::uint64_t hits = 0;
    double hit_ratio = 0.0; // hits / (requests - revoked_attempts)
    std::uint64_t upstream_bytes = 0;
    std::uint32_t cover_size = 0;
    std::uint64_t duplicated_entries = 0; // ConTbl entries born this period
};

// Audit point after each simulated period; provider is null in networked
// mode. Used by verification suites to inspect table growth.
struct PeriodAudit {
    const MetricsRow& row;
    const Provider* provider;
};
using PeriodHook = std::function<void(const PeriodAudit&)>;

// Everyone attempts requests every period; holders of passed periods are
// tallied as revoked_attempts and never touch the network. One fresh
// SP + CS pair per capacity, identical request trace across capacities.
std::vector<MetricsRow> run_experiment(const SimConfig& config,
                                       const PeriodHook& hook = {});

// user index -> assigned period, round-robin across leaves.
std::vector<TimePeriod> assign_users(std::uint32_t n_users,
                                     std::uint32_t t_max);

// Seed of the per-period request stream; draws are round-major (for each
// round, every user draws once). Exposed so tests can replay traces.
std::uint64_t period_stream_seed(std::uint64_t seed, TimePeriod period);

// Deterministic catalog bytes for content index k.
Bytes content_bytes(std::uint64_t seed, std::uint32_t k, std::uint32_t size);
std::string content_name(std::uint32_t k);

std::string to_csv(const std::vector<MetricsRow>& rows);

} // namespace chronocache::sim
