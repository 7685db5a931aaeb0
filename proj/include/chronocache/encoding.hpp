#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "chronocache/types.hpp"

namespace chronocache::enc {

std::string hex_encode(std::span<const std::uint8_t> data); // lowercase
std::optional<Bytes> hex_decode(std::string_view text);     // strict, even length

// base64url alphabet, no padding. Decode rejects padding, whitespace and
// non-alphabet characters.
std::string b64url_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> b64url_decode(std::string_view text);

} // namespace chronocache::enc
