#include "chronocache/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "chronocache/api.hpp"
#include "chronocache/client.hpp"
#include "chronocache/http_client.hpp"
#include "chronocache/log.hpp"

namespace chronocache::sim {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

ZipfSampler::ZipfSampler(double s, double v, std::uint32_t n) : n_(n) {
    if (!(s > 1.0))
        throw std::invalid_argument("zipf: s must be > 1");
    if (!(v >= 1.0))
        throw std::invalid_argument("zipf: v must be >= 1");
    if (n < 1)
        throw std::invalid_argument("zipf: empty support");
    cdf_.resize(n);
    weight_.resize(n);
    double acc = 0.0;
    for (std::uint32_t k = 0; k < n; ++k) {
        weight_[k] = std::pow(v + static_cast<double>(k), -s);
        acc += weight_[k];
        cdf_[k] = acc;
    }
    total_ = acc;
}

std::uint32_t ZipfSampler::operator()(SplitMix64& rng) const {
    const double u = rng.next_unit() * total_;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        return n_ - 1;
    return static_cast<std::uint32_t>(it - cdf_.begin());
}

double ZipfSampler::mass(std::uint32_t k) const {
    if (k >= n_)
        throw std::out_of_range("zipf rank out of support");
    return weight_[k] / total_;
}

void SimConfig::validate() const {
    tree::TreeParams check(m); // throws on bad m
    (void)check;
    if (n_users < 1 || n_contents < 1 || requests_per_user_per_period < 1 ||
        content_size_bytes < 1)
        throw std::invalid_argument("sim config: counts must be positive");
    if (capacities.empty())
        throw std::invalid_argument("sim config: need at least one capacity");
    for (std::uint32_t c : capacities)
        if (c < 1)
            throw std::invalid_argument("sim config: capacity must be positive");
    if (!(zipf_s > 1.0) || !(zipf_v >= 1.0))
        throw std::invalid_argument("sim config: zipf parameters out of range");
    if (mode == Mode::networked) {
        if (sp_addr.empty() || cs_addr.empty())
            throw std::invalid_argument("sim config: networked mode needs sp/cs addresses");
        if (capacities.size() != 1)
            throw std::invalid_argument(
                "sim config: networked mode drives one externally provisioned "
                "cache, configure exactly one capacity");
    }
}

std::vector<TimePeriod> assign_users(std::uint32_t n_users,
                                     std::uint32_t t_max) {
    std::vector<TimePeriod> assignment(n_users);
    for (std::uint32_t u = 0; u < n_users; ++u)
        assignment[u] = (u % t_max) + 1;
    return assignment;
}

std::uint64_t period_stream_seed(std::uint64_t seed, TimePeriod period) {
    SplitMix64 mixer(seed ^ (0x7472616365ull + period)); // per-period stream
    return mixer.next();
}

Bytes content_bytes(std::uint64_t seed, std::uint32_t k, std::uint32_t size) {
    SplitMix64 rng(seed ^ (0x636f6e74ull + k * 0x9e3779b97f4a7c15ull));
    Bytes out(size);
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = rng.next();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word);
            word >>= 8;
        }
    }
    return out;
}

std::string content_name(std::uint32_t k) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "content_%05u", k);
    return buf;
}

namespace {

// One capacity run's backend: either a freshly built in-process SP + CS
// or adapters onto externally running servers.
struct Deployment {
    virtual ~Deployment() = default;
    virtual SpApi& sp() = 0;
    virtual CsApi& cs() = 0;
    virtual const Provider* provider() const { return nullptr; }
};

struct LocalDeployment final : Deployment {
    LocalDeployment(const SimConfig& config, std::uint32_t capacity) {
        crypto::SeededEntropy key_entropy(config.seed ^ 0x6b657973ull);
        const tree::TreeParams params(config.m);
        crypto::NodeKeySet keys = crypto::keygen(params, key_entropy);
        crypto::MacKey mac = crypto::gen_mac_key(key_entropy);
        provider_ = std::make_unique<Provider>(params, std::move(keys), mac);
        for (std::uint32_t k = 0; k < config.n_contents; ++k)
            provider_->register_content(
                content_name(k),
                content_bytes(config.seed, k, config.content_size_bytes));
        cache_ = std::make_unique<CacheServer>(
            CacheServer::Config{capacity, 0});
        sp_ = std::make_unique<LocalSp>(*provider_);
        cs_ = std::make_unique<LocalCs>(*cache_, *sp_);
    }

    SpApi& sp() override { return *sp_; }
    CsApi& cs() override { return *cs_; }
    const Provider* provider() const override { return provider_.get(); }

    std::unique_ptr<Provider> provider_;
    std::unique_ptr<CacheServer> cache_;
    std::unique_ptr<LocalSp> sp_;
    std::unique_ptr<LocalCs> cs_;
};

struct RemoteDeployment final : Deployment {
    RemoteDeployment(const std::string& sp_addr, const std::string& cs_addr)
        : sp_(sp_addr), cs_(cs_addr) {}

    SpApi& sp() override { return sp_; }
    CsApi& cs() override { return cs_; }

    HttpSpClient sp_;
    HttpCsClient cs_;
};

std::unique_ptr<Deployment> make_deployment(const SimConfig& config,
                                            std::uint32_t capacity) {
    if (config.mode == Mode::networked)
        return std::make_unique<RemoteDeployment>(config.sp_addr,
                                                  config.cs_addr);
    return std::make_unique<LocalDeployment>(config, capacity);
}

[[noreturn]] void backend_fail(const char* where, const Error& err) {
    throw std::runtime_error(std::string("sim: ") + where + " failed: " +
                             to_string(err.code) + " " + err.message);
}

} // namespace

std::vector<MetricsRow> run_experiment(const SimConfig& config,
                                       const PeriodHook& hook) {
    config.validate();

    const tree::TreeParams params(config.m);
    const ZipfSampler zipf(config.zipf_s, config.zipf_v, config.n_contents);
    const auto assignment = assign_users(config.n_users, params.t_max());

    // Pre-generate names and, in-process, the expected plaintexts.
    std::vector<std::string> names(config.n_contents);
    for (std::uint32_t k = 0; k < config.n_contents; ++k)
        names[k] = content_name(k);
    std::vector<Bytes> expected;
    if (config.mode == Mode::in_process) {
        expected.resize(config.n_contents);
        for (std::uint32_t k = 0; k < config.n_contents; ++k)
            expected[k] = content_bytes(config.seed, k, config.content_size_bytes);
    }

    std::vector<MetricsRow> rows;
    rows.reserve(config.capacities.size() * params.t_max());

    for (std::uint32_t capacity : config.capacities) {
        auto deployment = make_deployment(config, capacity);
        SpApi& sp = deployment->sp();
        CsApi& cs = deployment->cs();

        // one ring per leaf; users on the same leaf share access rights
        std::vector<KeyRing> rings;
        rings.reserve(params.t_max());
        for (TimePeriod leaf = 1; leaf <= params.t_max(); ++leaf) {
            auto resp = sp.keys(wire::KeysRequest{"sim", leaf});
            if (!resp.ok())
                backend_fail("key bootstrap", resp.error());
            rings.push_back(ring_from_keys_response(resp.value()));
        }

        std::uint64_t prev_entries = 0;
        if (config.mode == Mode::networked) {
            auto ts = sp.table_stats();
            if (!ts.ok())
                backend_fail("table stats", ts.error());
            prev_entries = ts.value().entries;
        }

        for (TimePeriod period = 1; period <= params.t_max(); ++period) {
            if (auto adv = sp.advance(period); !adv.ok())
                backend_fail("advance", adv.error());
            if (auto rst = cs.reset_stats(); !rst.ok())
                backend_fail("stats reset", rst.error());

            MetricsRow row;
            row.period = period;
            row.capacity = capacity;
            row.cover_size = static_cast<std::uint32_t>(
                tree::comp_subtree(params, period - 1).size());

            SplitMix64 stream(period_stream_seed(config.seed, period));
            for (std::uint32_t round = 0;
                 round < config.requests_per_user_per_period; ++round) {
                for (std::uint32_t u = 0; u < config.n_users; ++u) {
                    const std::uint32_t k = zipf(stream);
                    ++row.requests;
                    const TimePeriod t_user = assignment[u];
                    if (t_user < period) {
                        ++row.revoked_attempts; // wakes up, aborts locally
                        continue;
                    }
                    Result<Bytes> got = request_content(
                        rings[t_user - 1], names[k], period, sp, cs);
                    if (!got.ok())
                        backend_fail("request_content", got.error());
                    if (!expected.empty() && got.value() != expected[k])
                        throw std::runtime_error(
                            "sim: decrypted bytes do not match catalog for " +
                            names[k]);
                }
            }

            auto stats = cs.stats();
            if (!stats.ok())
                backend_fail("stats", stats.error());
            row.hits = stats.value().hits;
            row.upstream_bytes = stats.value().upstream_bytes;
            const std::uint64_t served = row.requests - row.revoked_attempts;
            row.hit_ratio = served == 0
                                ? 0.0
                                : static_cast<double>(row.hits) /
                                      static_cast<double>(served);

            std::uint64_t entries_now = 0;
            if (const Provider* p = deployment->provider()) {
                entries_now = p->total_entries();
            } else {
                auto ts = sp.table_stats();
                if (!ts.ok())
                    backend_fail("table stats", ts.error());
                entries_now = ts.value().entries;
            }
            row.duplicated_entries = entries_now - prev_entries;
            prev_entries = entries_now;

            rows.push_back(row);
            log::debug("sim: capacity=%u period=%u hit_ratio=%.4f entries=%llu",
                       capacity, period, row.hit_ratio,
                       static_cast<unsigned long long>(entries_now));
            if (hook)
                hook(PeriodAudit{rows.back(), deployment->provider()});
        }
    }
    return rows;
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "period,capacity,requests,revoked_attempts,hits,"
                      "hit_ratio,upstream_bytes,cover_size,duplicated_entries\n";
    char line[256];
    for (const MetricsRow& r : rows) {
        std::snprintf(line, sizeof(line),
                      "%u,%u,%llu,%llu,%llu,%.6f,%llu,%u,%llu\n", r.period,
                      r.capacity, static_cast<unsigned long long>(r.requests),
                      static_cast<unsigned long long>(r.revoked_attempts),
                      static_cast<unsigned long long>(r.hits), r.hit_ratio,
                      static_cast<unsigned long long>(r.upstream_bytes),
                      r.cover_size,
                      static_cast<unsigned long long>(r.duplicated_entries));
        out += line;
    }
    return out;
}

} // namespace chronocache::sim
