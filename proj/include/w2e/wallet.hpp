#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "w2e/common.hpp"

namespace w2e {

/// The standard 2048-word English mnemonic word list, loaded from a data file
/// whose SHA-256 must match the pinned value.
class Wordlist {
 public:
  static constexpr std::string_view kEnglishSha256 =
      "2f5eed53a4727b4bf8880d8f3f199efc90e58503646d9ff8eff3a2ed3b24dbda";

  static Result<Wordlist> load_file(const std::string& path);

  int index_of(std::string_view word) const;  // -1 when absent
  const std::string& word(std::size_t index) const { return words_[index]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
};

struct Mnemonic {
  std::vector<std::string> words;
  std::string phrase() const;  // space-joined
};

enum class MnemonicIssue { None, BadWordCount, UnknownWord, BadChecksum };
std::string_view mnemonic_issue_name(MnemonicIssue issue);

struct MnemonicCheck {
  bool valid = false;
  MnemonicIssue issue = MnemonicIssue::None;
  std::string offendingWord;  // set for UnknownWord
};

/// Encodes entropy || checksum into 11-bit word indices. Entropy must be
/// 16/20/24/28/32 bytes.
Result<Mnemonic> generate_mnemonic(std::span<const std::uint8_t> entropy,
                                   const Wordlist& wordlist);

MnemonicCheck validate_mnemonic(std::span<const std::string> words,
                                const Wordlist& wordlist);

/// Inverse of generate_mnemonic; fails on any validation issue.
Result<std::vector<std::uint8_t>> mnemonic_to_entropy(std::span<const std::string> words,
                                                      const Wordlist& wordlist);

/// PBKDF2-HMAC-SHA512(phrase, "mnemonic" + passphrase, 2048 iterations, 64 bytes).
Result<std::array<std::uint8_t, 64>> mnemonic_to_seed(std::span<const std::string> words,
                                                      const Wordlist& wordlist,
                                                      std::string_view passphrase);

struct DerivedAccount {
  std::array<std::uint8_t, 64> seed{};
  std::uint32_t index = 0;
  Address address;
};

/// Simulator-local account derivation: address = first 20 bytes of
/// SHA-256(seed || index as 4-byte big-endian). Deterministic in (seed, index).
/// Live-chain key derivation and signing live behind the gateway's signer
/// boundary instead.
DerivedAccount derive_account(const std::array<std::uint8_t, 64>& seed, std::uint32_t index);

/// Splits a phrase on ASCII spaces.
std::vector<std::string> split_phrase(std::string_view phrase);

}  // namespace w2e
