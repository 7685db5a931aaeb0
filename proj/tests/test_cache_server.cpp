#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include "chronocache/cache_server.hpp"
#include "oracles.hpp"

using namespace chronocache;

namespace {

crypto::Tag tag_n(std::uint64_t n) {
    crypto::Tag t;
    for (std::size_t i = 0; i < 8; ++i)
        t.bytes[i] = static_cast<std::uint8_t>(n >> (8 * i));
    t.bytes[31] = 0x7e;
    return t;
}

// synthetic upstream: ciphertext bytes derived from the tag
Result<Bytes> synth_upstream(const crypto::Tag& t) {
    Bytes out(48);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(t.bytes[i % 32] ^ i);
    return out;
}

} // namespace

TEST_CASE("miss then hit, ciphertext preserved") {
    CacheServer cache({2, 0});
    const crypto::Tag a = tag_n(1);

    auto first = cache.send_content(a, synth_upstream);
    REQUIRE(first.ok());
    CHECK(!first.value().hit);
    auto second = cache.send_content(a, synth_upstream);
    REQUIRE(second.ok());
    CHECK(second.value().hit);
    CHECK(second.value().ciphertext == first.value().ciphertext);

    const CacheStats s = cache.stats_snapshot();
    CHECK(s.hits == 1);
    CHECK(s.misses == 1);
    CHECK(s.upstream_bytes == 48);
    CHECK(s.downstream_bytes == 96);
}

TEST_CASE("LRU semantics: capacity 2, A B C evicts A") {
    CacheServer cache({2, 0});
    for (std::uint64_t n : {1, 2, 3})
        REQUIRE(cache.send_content(tag_n(n), synth_upstream).ok());
    CHECK(cache.size() == 2);
    CHECK(!cache.cached(tag_n(1)));

    auto again = cache.send_content(tag_n(1), synth_upstream);
    REQUIRE(again.ok());
    CHECK(!again.value().hit); // evicted as least recently used
}

TEST_CASE("lookup refreshes recency") {
    CacheServer cache({2, 0});
    REQUIRE(cache.send_content(tag_n(1), synth_upstream).ok());
    REQUIRE(cache.send_content(tag_n(2), synth_upstream).ok());
    REQUIRE(cache.send_content(tag_n(1), synth_upstream).value().hit);
    REQUIRE(cache.send_content(tag_n(3), synth_upstream).ok()); // evicts 2
    CHECK(cache.cached(tag_n(1)));
    CHECK(!cache.cached(tag_n(2)));
}

TEST_CASE("upstream NOT_FOUND is propagated and never cached") {
    CacheServer cache({2, 0});
    const auto res = cache.send_content(tag_n(9), [](const crypto::Tag&) {
        return Result<Bytes>::failure(ErrorCode::not_found, "no such tag");
    });
    CHECK(res.code() == ErrorCode::not_found);
    CHECK(cache.size() == 0);
    CHECK(cache.stats_snapshot().upstream_bytes == 0);

    const auto err = cache.send_content(tag_n(9), [](const crypto::Tag&) {
        return Result<Bytes>::failure(ErrorCode::upstream_error, "down");
    });
    CHECK(err.code() == ErrorCode::upstream_error);
    CHECK(cache.size() == 0);
}

TEST_CASE("stats arithmetic and reset") {
    CacheServer cache({4, 0});
    REQUIRE(cache.send_content(tag_n(1), synth_upstream).ok());
    for (int i = 0; i < 3; ++i)
        REQUIRE(cache.send_content(tag_n(1), synth_upstream).value().hit);
    const CacheStats s = cache.stats_snapshot();
    CHECK(s.hits == 3);
    CHECK(s.misses == 1);
    CHECK(s.hit_ratio() == doctest::Approx(0.75));

    cache.reset_stats();
    const CacheStats zero = cache.stats_snapshot();
    CHECK(zero.hits == 0);
    CHECK(zero.misses == 0);
    CHECK(zero.upstream_bytes == 0);
    CHECK(zero.downstream_bytes == 0);
    CHECK(zero.hit_ratio() == 0.0);
    CHECK(cache.size() == 1); // reset clears counters, not contents
}

TEST_CASE("upstream bytes accumulate per distinct miss") {
    CacheServer cache({64, 0});
    for (std::uint64_t n = 0; n < 10; ++n)
        REQUIRE(cache.send_content(tag_n(n), synth_upstream).ok());
    CHECK(cache.stats_snapshot().upstream_bytes == 10 * 48);
}

TEST_CASE("replayed traces match a reference LRU") {
    std::uint64_t state = 7;
    auto next = [&state] {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state >> 33;
    };
    for (const std::size_t capacity : {1u, 3u, 8u, 32u}) {
        CacheServer cache({capacity, 0});
        test_oracle::ReferenceLru oracle(capacity);
        std::vector<std::uint64_t> store;
        for (int i = 0; i < 4000; ++i) {
            const std::uint64_t key = next() % 64;
            const bool expect_hit = oracle.access(key, store);
            const auto got = cache.send_content(tag_n(key), synth_upstream);
            REQUIRE(got.ok());
            CHECK(got.value().hit == expect_hit);
            CHECK(cache.size() == store.size());
            CHECK(cache.size() <= capacity);
        }
        // final contents agree
        for (std::uint64_t key : store)
            CHECK(cache.cached(tag_n(key)));
    }
}

TEST_CASE("stack property: larger caches hit wherever smaller ones do") {
    std::uint64_t state = 21;
    auto next = [&state] {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state >> 33;
    };
    std::vector<std::uint64_t> trace(6000);
    for (auto& k : trace)
        k = next() % 128;

    CacheServer small({8, 0}), medium({16, 0}), large({64, 0});
    std::uint64_t hits_small = 0, hits_medium = 0, hits_large = 0;
    for (std::uint64_t key : trace) {
        const bool hs = small.send_content(tag_n(key), synth_upstream).value().hit;
        const bool hm = medium.send_content(tag_n(key), synth_upstream).value().hit;
        const bool hl = large.send_content(tag_n(key), synth_upstream).value().hit;
        if (hs)
            CHECK(hm); // inclusion: hits(c1) subset of hits(c2) for c1 <= c2
        if (hm)
            CHECK(hl);
        hits_small += hs;
        hits_medium += hm;
        hits_large += hl;
    }
    CHECK(hits_small <= hits_medium);
    CHECK(hits_medium <= hits_large);
}

TEST_CASE("byte budget mode evicts to fit and skips oversized items") {
    CacheServer cache({0, 100});
    REQUIRE(cache.send_content(tag_n(1), synth_upstream).ok()); // 48 bytes
    REQUIRE(cache.send_content(tag_n(2), synth_upstream).ok()); // 96 total
    CHECK(cache.size() == 2);
    REQUIRE(cache.send_content(tag_n(3), synth_upstream).ok()); // evicts 1
    CHECK(cache.size() == 2);
    CHECK(cache.stored_bytes() == 96);
    CHECK(!cache.cached(tag_n(1)));

    const auto big = cache.send_content(tag_n(4), [](const crypto::Tag&) {
        return Result<Bytes>(Bytes(500, 0x11));
    });
    REQUIRE(big.ok()); // served pass-through, larger than the whole budget
    CHECK(!cache.cached(tag_n(4)));
    CHECK(cache.size() == 2);

    CHECK_THROWS_AS(CacheServer({0, 0}), std::invalid_argument);
}

TEST_CASE("concurrent misses for one tag collapse to a single fetch") {
    CacheServer cache({8, 0});
    std::atomic<int> upstream_calls{0};
    auto slow_upstream = [&](const crypto::Tag& t) {
        upstream_calls.fetch_add(1);
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        return synth_upstream(t);
    };

    constexpr int kThreads = 8;
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < kThreads; ++i)
        threads.emplace_back([&] {
            const auto res = cache.send_content(tag_n(5), slow_upstream);
            if (res.ok() && res.value().ciphertext == synth_upstream(tag_n(5)).value())
                ok.fetch_add(1);
        });
    for (auto& th : threads)
        th.join();

    CHECK(ok.load() == kThreads);
    CHECK(upstream_calls.load() == 1); // single flight
    const CacheStats s = cache.stats_snapshot();
    CHECK(s.upstream_bytes == 48);
    CHECK(s.hits + s.misses == kThreads);
    CHECK(s.misses >= 1);
}
