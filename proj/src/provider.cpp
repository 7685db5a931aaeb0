#include "chronocache/provider.hpp"

#include <mutex>
#include <stdexcept>

namespace chronocache {

Provider::Provider(tree::TreeParams params, crypto::NodeKeySet keys,
                   crypto::MacKey mac_key, crypto::NonceBits nonce_bits)
    : params_(params), keys_(std::move(keys)), mac_key_(mac_key),
      nonce_bits_(nonce_bits) {
    if (keys_.m() != params_.m)
        throw std::invalid_argument("key set does not match tree depth");
    current_cover_ = tree::comp_subtree(params_, 0);
}

void Provider::register_content(std::string c_name, Bytes content) {
    if (c_name.empty())
        throw std::invalid_argument("c_name must be non-empty");
    if (content.empty())
        throw std::invalid_argument("content must be non-empty");
    std::unique_lock lock(mu_);
    const auto [it, inserted] =
        by_name_.try_emplace(std::move(c_name), ContentRecord{std::move(content), {}});
    if (!inserted)
        throw std::invalid_argument("duplicate c_name: " + it->first);
}

void Provider::gen_table(std::vector<ContentInput> contents) {
    {
        std::shared_lock lock(mu_);
        std::unordered_map<std::string_view, int> seen;
        for (const auto& input : contents) {
            if (!params_.valid_period(input.t))
                throw std::out_of_range("content release period out of range");
            if (input.c_name.empty() || input.content.empty())
                throw std::invalid_argument("empty c_name or content");
            if (++seen[input.c_name] > 1 || by_name_.contains(input.c_name))
                throw std::invalid_argument("duplicate c_name: " + input.c_name);
        }
    }
    std::unique_lock lock(mu_);
    for (auto& input : contents) {
        const auto [it, inserted] = by_name_.try_emplace(
            input.c_name, ContentRecord{std::move(input.content), {}});
        if (!inserted)
            throw std::invalid_argument("duplicate c_name: " + it->first);
        for (NodeId node : tree::comp_subtree(params_, input.t - 1).nodes)
            materialize_locked(it->first, it->second, node);
    }
}

std::vector<std::pair<NodeId, crypto::ContentKey>>
Provider::send_key(std::string_view /*user_id*/, TimePeriod t) const {
    std::vector<std::pair<NodeId, crypto::ContentKey>> out;
    for (NodeId node : tree::path(params_, t)) // throws on bad t
        out.emplace_back(node, keys_.at(node));
    return out;
}

const Provider::Entry&
Provider::materialize_locked(const std::string& c_name, ContentRecord& record,
                             NodeId node) {
    const auto it = record.entries.find(node);
    if (it != record.entries.end())
        return it->second;
    const crypto::Tag tag = crypto::derive_tag(mac_key_, record.content, node);
    Bytes ct = crypto::encrypt(keys_.at(node), tag, record.content, nonce_bits_);
    const auto [pos, inserted] =
        record.entries.emplace(node, Entry{tag, std::move(ct)});
    by_tag_.emplace(tag, std::make_pair(c_name, node));
    ++entry_count_;
    (void)inserted;
    return pos->second;
}

Result<crypto::Tag> Provider::handle_content_request(std::string_view c_name,
                                                     NodeId node) {
    {
        std::shared_lock lock(mu_);
        const auto it = by_name_.find(std::string(c_name));
        if (it == by_name_.end())
            return Result<crypto::Tag>::failure(ErrorCode::not_found,
                                                "unknown content name");
        if (!current_cover_.contains(node))
            return Error{ErrorCode::no_entry, "node not in current cover",
                         t_curr_};
        const auto entry = it->second.entries.find(node);
        if (entry != it->second.entries.end())
            return entry->second.tag;
    }
    // first request for this (content, node): take the write lock and
    // re-check so concurrent requests agree on one canonical entry
    std::unique_lock lock(mu_);
    const auto it = by_name_.find(std::string(c_name));
    if (it == by_name_.end())
        return Result<crypto::Tag>::failure(ErrorCode::not_found,
                                            "unknown content name");
    if (!current_cover_.contains(node))
        return Error{ErrorCode::no_entry, "node not in current cover", t_curr_};
    return materialize_locked(it->first, it->second, node).tag;
}

Result<Bytes> Provider::handle_cache_request(const crypto::Tag& tag) {
    std::shared_lock lock(mu_);
    const auto it = by_tag_.find(tag);
    if (it == by_tag_.end())
        return Result<Bytes>::failure(ErrorCode::not_found, "unknown tag");
    return by_name_.at(it->second.first).entries.at(it->second.second).ciphertext;
}

void Provider::set_period_locked(TimePeriod t) {
    t_curr_ = t;
    current_cover_ = tree::comp_subtree(params_, t - 1);
}

void Provider::advance_period(TimePeriod t_new) {
    if (!params_.valid_period(t_new))
        throw std::out_of_range("time period out of range");
    std::unique_lock lock(mu_);
    if (t_new < t_curr_)
        throw std::invalid_argument("current period never decreases");
    set_period_locked(t_new);
}

TimePeriod Provider::current_period() const {
    std::shared_lock lock(mu_);
    return t_curr_;
}

std::size_t Provider::total_entries() const {
    std::shared_lock lock(mu_);
    return entry_count_;
}

std::size_t Provider::content_count() const {
    std::shared_lock lock(mu_);
    return by_name_.size();
}

void Provider::for_each_entry(
    const std::function<void(const std::string&, NodeId, const crypto::Tag&,
                             const Bytes&)>& fn) const {
    std::shared_lock lock(mu_);
    for (const auto& [name, record] : by_name_)
        for (const auto& [node, entry] : record.entries)
            fn(name, node, entry.tag, entry.ciphertext);
}

std::vector<std::pair<std::string, std::size_t>> Provider::entry_counts() const {
    std::shared_lock lock(mu_);
    std::vector<std::pair<std::string, std::size_t>> out;
    out.reserve(by_name_.size());
    for (const auto& [name, record] : by_name_)
        out.emplace_back(name, record.entries.size());
    return out;
}

} // namespace chronocache
