#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "chronocache/sim.hpp"

using namespace chronocache;
using namespace chronocache::sim;

TEST_CASE("zipf masses follow (v+k)^-s exactly") {
    const ZipfSampler zipf(3.0, 3000.0, 65535);
    // P(0)/P(3000) = ((3000+3000)/3000)^3 = 8
    CHECK(zipf.mass(0) / zipf.mass(3000) == doctest::Approx(8.0).epsilon(1e-12));
    // masses sum to one
    double total = 0.0;
    for (std::uint32_t k = 0; k < zipf.size(); ++k)
        total += zipf.mass(k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    // monotone nonincreasing
    for (std::uint32_t k = 1; k < 100; ++k)
        CHECK(zipf.mass(k) <= zipf.mass(k - 1));
    CHECK_THROWS_AS(zipf.mass(65535), std::out_of_range);
}

TEST_CASE("zipf parameter validation") {
    CHECK_THROWS_AS(ZipfSampler(1.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(ZipfSampler(2.0, 0.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(ZipfSampler(2.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("zipf with a single item always returns it") {
    const ZipfSampler zipf(3.0, 3000.0, 1);
    SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i)
        CHECK(zipf(rng) == 0);
}

TEST_CASE("empirical frequencies sit within 3 sigma of the exact masses") {
    const ZipfSampler zipf(3.0, 3000.0, 65535);
    SplitMix64 rng(20260808);
    constexpr std::uint64_t kDraws = 1000000;
    std::map<std::uint32_t, std::uint64_t> counts;
    std::uint64_t in_support = 0;
    for (std::uint64_t i = 0; i < kDraws; ++i) {
        const std::uint32_t k = zipf(rng);
        REQUIRE(k < 65535);
        ++in_support;
        if (k < 10)
            ++counts[k];
    }
    CHECK(in_support == kDraws);
    for (std::uint32_t k = 0; k < 10; ++k) {
        const double p = zipf.mass(k);
        const double expect = static_cast<double>(kDraws) * p;
        const double sigma = std::sqrt(static_cast<double>(kDraws) * p * (1 - p));
        CHECK(std::abs(static_cast<double>(counts[k]) - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("small-support zipf sampling matches exact masses") {
    // s=2, v=2, n=8; coarse enough to check the whole pmf
    const ZipfSampler zipf(2.0, 2.0, 8);
    const double expected[8] = {0.46316218174010226, 0.20584985855115653,
                                0.11579054543502557, 0.07410594907841636,
                                0.05146246463778913, 0.03780915769306957,
                                0.02894763635875639, 0.02287220650568406};
    for (int k = 0; k < 8; ++k)
        CHECK(zipf.mass(k) == doctest::Approx(expected[k]).epsilon(1e-12));

    SplitMix64 rng(99);
    constexpr std::uint64_t kDraws = 200000;
    std::uint64_t counts[8] = {};
    for (std::uint64_t i = 0; i < kDraws; ++i)
        ++counts[zipf(rng)];
    for (int k = 0; k < 8; ++k) {
        const double p = expected[k];
        const double sigma = std::sqrt(kDraws * p * (1 - p));
        CHECK(std::abs(static_cast<double>(counts[k]) - kDraws * p) <=
              3.0 * sigma);
    }
}

TEST_CASE("user assignment is uniform with round-robin remainder") {
    const auto full = assign_users(2048, 16);
    std::map<TimePeriod, int> per_leaf;
    for (TimePeriod t : full)
        ++per_leaf[t];
    CHECK(per_leaf.size() == 16);
    for (const auto& [leaf, n] : per_leaf)
        CHECK(n == 128);

    const auto uneven = assign_users(5, 4);
    std::map<TimePeriod, int> sizes;
    for (TimePeriod t : uneven)
        ++sizes[t];
    CHECK(sizes[1] == 2);
    CHECK(sizes[2] == 1);
    CHECK(sizes[3] == 1);
    CHECK(sizes[4] == 1);

    CHECK(assign_users(2048, 16) == full); // deterministic
}

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.m = 2;
    cfg.n_users = 8;
    cfg.n_contents = 16;
    cfg.requests_per_user_per_period = 4;
    cfg.capacities = {4};
    cfg.zipf_s = 2.0;
    cfg.zipf_v = 2.0;
    cfg.content_size_bytes = 64;
    cfg.seed = 42;
    return cfg;
}

} // namespace

TEST_CASE("experiment shape: one row per (capacity, period)") {
    const auto rows = run_experiment(small_config());
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const MetricsRow& r = rows[i];
        CHECK(r.period == i + 1);
        CHECK(r.capacity == 4);
        CHECK(r.requests == 32);
        CHECK(r.hits + r.revoked_attempts <= r.requests);
        CHECK(r.hit_ratio ==
              doctest::Approx(static_cast<double>(r.hits) /
                              static_cast<double>(r.requests -
                                                  r.revoked_attempts)));
    }
    CHECK(rows[0].cover_size == 1);
    CHECK(rows[1].cover_size == 2); // m=2, r=1 -> {3, 5}
    CHECK(rows[0].revoked_attempts == 0);
}

TEST_CASE("revoked attempts recount from the assignment map") {
    const SimConfig cfg = small_config();
    const auto rows = run_experiment(cfg);
    const auto assignment = assign_users(cfg.n_users, 4);
    for (const MetricsRow& r : rows) {
        std::uint64_t expect = 0;
        for (TimePeriod t_user : assignment)
            if (t_user < r.period)
                expect += cfg.requests_per_user_per_period;
        CHECK(r.revoked_attempts == expect);
    }
}

TEST_CASE("per-period table growth is bounded by cover x distinct requests") {
    const SimConfig cfg = small_config();
    const ZipfSampler zipf(cfg.zipf_s, cfg.zipf_v, cfg.n_contents);
    const auto rows = run_experiment(cfg);
    for (const MetricsRow& r : rows) {
        // replay the period's trace to recover the distinct contents
        SplitMix64 stream(period_stream_seed(cfg.seed, r.period));
        std::set<std::uint32_t> distinct;
        for (std::uint32_t round = 0;
             round < cfg.requests_per_user_per_period; ++round)
            for (std::uint32_t u = 0; u < cfg.n_users; ++u)
                distinct.insert(zipf(stream));
        CHECK(r.duplicated_entries <= r.cover_size * distinct.size());
    }
    // period 1: the root cover means at most one entry per distinct content
    SplitMix64 stream(period_stream_seed(cfg.seed, 1));
    std::set<std::uint32_t> distinct;
    for (std::uint32_t i = 0; i < 32; ++i)
        distinct.insert(zipf(stream));
    CHECK(rows[0].duplicated_entries == distinct.size());
}

TEST_CASE("identical seeds give byte-identical CSV") {
    const auto a = to_csv(run_experiment(small_config()));
    const auto b = to_csv(run_experiment(small_config()));
    CHECK(a == b);

    SimConfig other = small_config();
    other.seed = 43;
    CHECK(to_csv(run_experiment(other)) != a);
}

TEST_CASE("hit ratio is nondecreasing in capacity, period by period") {
    SimConfig cfg = small_config();
    cfg.m = 3;
    cfg.n_users = 32;
    cfg.n_contents = 64;
    cfg.requests_per_user_per_period = 8;
    cfg.capacities = {2, 8, 32};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 3 * 8);
    std::map<std::uint32_t, std::map<std::uint32_t, double>> by_period;
    for (const MetricsRow& r : rows)
        by_period[r.period][r.capacity] = r.hit_ratio;
    for (const auto& [period, per_cap] : by_period) {
        CHECK(per_cap.at(2) <= per_cap.at(8));
        CHECK(per_cap.at(8) <= per_cap.at(32));
    }
}

TEST_CASE("audit hook sees every period with a live provider") {
    int called = 0;
    std::uint64_t entries_total = 0;
    const auto rows = run_experiment(small_config(), [&](const PeriodAudit& a) {
        ++called;
        REQUIRE(a.provider != nullptr);
        entries_total += a.row.duplicated_entries;
        CHECK(a.provider->total_entries() >= a.row.duplicated_entries);
    });
    CHECK(called == 4);
    CHECK(entries_total == rows.back().duplicated_entries +
                               rows[0].duplicated_entries +
                               rows[1].duplicated_entries +
                               rows[2].duplicated_entries);
}

TEST_CASE("config validation") {
    SimConfig cfg = small_config();
    cfg.capacities.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = small_config();
    cfg.zipf_s = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = small_config();
    cfg.mode = Mode::networked;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // no addresses

    cfg.sp_addr = "localhost:1";
    cfg.cs_addr = "localhost:2";
    cfg.capacities = {4, 8};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // one capacity only
    cfg.capacities = {4};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("csv header and formatting are stable") {
    MetricsRow r;
    r.period = 2;
    r.capacity = 4096;
    r.requests = 131072;
    r.revoked_attempts = 8192;
    r.hits = 61440;
    r.hit_ratio = 0.5;
    r.upstream_bytes = 123456789;
    r.cover_size = 4;
    r.duplicated_entries = 777;
    CHECK(to_csv({r}) ==
          "period,capacity,requests,revoked_attempts,hits,hit_ratio,"
          "upstream_bytes,cover_size,duplicated_entries\n"
          "2,4096,131072,8192,61440,0.500000,123456789,4,777\n");
}
