#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace chronocache {

using Bytes = std::vector<std::uint8_t>;

// Heap-style node numbering: root = 1, children of x are 2x and 2x+1.
using NodeId = std::uint32_t;
// 1-based time period; period t maps to leaf 2^m + t - 1.
using TimePeriod = std::uint32_t;

enum class ErrorCode {
    not_found,
    no_entry,
    revoked,
    stale_period,
    upstream_error,
    validation,
    decrypt_fail,
};

const char* to_string(ErrorCode code);

struct Error {
    ErrorCode code;
    std::string message;
    // Authoritative provider period, attached to NO_ENTRY responses so a
    // client with a stale clock can recompute its node and retry.
    std::optional<TimePeriod> t_curr;
};

// Value-or-error carrier for protocol outcomes. Contract violations
// (out-of-range periods, malformed key material) throw instead.
template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error err) : v_(std::move(err)) {}

    static Result failure(ErrorCode code, std::string message = {}) {
        return Result(Error{code, std::move(message), std::nullopt});
    }

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    T& value() { return std::get<T>(v_); }
    const T& value() const { return std::get<T>(v_); }
    T&& take() { return std::move(std::get<T>(v_)); }

    Error& error() { return std::get<Error>(v_); }
    const Error& error() const { return std::get<Error>(v_); }
    ErrorCode code() const { return error().code; }

private:
    std::variant<T, Error> v_;
};

struct Unit {};
using VoidResult = Result<Unit>;

} // namespace chronocache
