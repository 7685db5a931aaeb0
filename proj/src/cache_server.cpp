#include "chronocache/cache_server.hpp"

#include <stdexcept>

namespace chronocache {

CacheServer::CacheServer(Config config) : config_(config) {
    if (config_.capacity_entries == 0 && config_.capacity_bytes == 0)
        throw std::invalid_argument("cache capacity must be positive");
}

Result<CacheServer::Served> CacheServer::send_content(
    const crypto::Tag& tag, const UpstreamFetch& upstream) {
    std::shared_future<Result<Bytes>> flight;
    std::promise<Result<Bytes>> my_promise;
    bool leader = false;

    {
        std::unique_lock lock(mu_);
        const auto it = index_.find(tag);
        if (it != index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second);
            ++stats_.hits;
            stats_.downstream_bytes += it->second->ciphertext.size();
            return Served{it->second->ciphertext, true};
        }
        ++stats_.misses;
        const auto in = inflight_.find(tag);
        if (in != inflight_.end()) {
            flight = in->second;
        } else {
            leader = true;
            flight = my_promise.get_future().share();
            inflight_.emplace(tag, flight);
        }
    }

    if (!leader) {
        // another request is already fetching this tag; share its result
        Result<Bytes> shared = flight.get();
        if (!shared.ok())
            return shared.error();
        std::unique_lock lock(mu_);
        stats_.downstream_bytes += shared.value().size();
        return Served{shared.take(), false};
    }

    Result<Bytes> fetched =
        Result<Bytes>::failure(ErrorCode::upstream_error, "fetch aborted");
    try {
        fetched = upstream(tag);
    } catch (...) {
        // resolve the flight before propagating so waiters never hang
        {
            std::unique_lock lock(mu_);
            inflight_.erase(tag);
        }
        my_promise.set_value(fetched);
        throw;
    }
    {
        std::unique_lock lock(mu_);
        if (fetched.ok()) {
            insert_locked(tag, fetched.value());
            stats_.upstream_bytes += fetched.value().size();
            stats_.downstream_bytes += fetched.value().size();
        }
        inflight_.erase(tag);
    }
    my_promise.set_value(fetched);
    if (!fetched.ok())
        return fetched.error();
    return Served{fetched.take(), false};
}

void CacheServer::insert_locked(const crypto::Tag& tag, const Bytes& ct) {
    if (config_.capacity_bytes > 0 && ct.size() > config_.capacity_bytes)
        return; // larger than the whole budget, serve pass-through
    if (index_.contains(tag))
        return; // raced with an identical insert
    while ((config_.capacity_entries > 0 && lru_.size() >= config_.capacity_entries) ||
           (config_.capacity_bytes > 0 && bytes_ + ct.size() > config_.capacity_bytes)) {
        const Slot& victim = lru_.back();
        bytes_ -= victim.ciphertext.size();
        index_.erase(victim.tag);
        lru_.pop_back();
    }
    lru_.push_front(Slot{tag, ct});
    index_.emplace(tag, lru_.begin());
    bytes_ += ct.size();
}

CacheStats CacheServer::stats_snapshot() const {
    std::unique_lock lock(mu_);
    return stats_;
}

void CacheServer::reset_stats() {
    std::unique_lock lock(mu_);
    stats_ = CacheStats{};
}

std::size_t CacheServer::size() const {
    std::unique_lock lock(mu_);
    return lru_.size();
}

std::size_t CacheServer::stored_bytes() const {
    std::unique_lock lock(mu_);
    return bytes_;
}

bool CacheServer::cached(const crypto::Tag& tag) const {
    std::unique_lock lock(mu_);
    return index_.contains(tag);
}

} // namespace chronocache
