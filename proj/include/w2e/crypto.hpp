#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace w2e {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> sha256(std::string_view text);

/// PBKDF2-HMAC-SHA512; the key-stretching step of mnemonic seed derivation.
std::vector<std::uint8_t> pbkdf2_hmac_sha512(std::string_view password,
                                             std::string_view salt,
                                             unsigned iterations,
                                             std::size_t key_len);

}  // namespace w2e
