#include "chronocache/types.hpp"

namespace chronocache {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found: return "NOT_FOUND";
    case ErrorCode::no_entry: return "NO_ENTRY";
    case ErrorCode::revoked: return "REVOKED";
    case ErrorCode::stale_period: return "STALE_PERIOD";
    case ErrorCode::upstream_error: return "UPSTREAM_ERROR";
    case ErrorCode::validation: return "VALIDATION";
    case ErrorCode::decrypt_fail: return "DECRYPT_FAIL";
    }
    return "UNKNOWN";
}

} // namespace chronocache
