#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace w2e {

using Amount = std::uint64_t;  // DMD base units (0 on-ledger decimals)
using Wei = std::uint64_t;
using Gas = std::uint64_t;
using TokenId = std::uint64_t;
using BlockNumber = std::uint64_t;
using TimeMs = std::int64_t;

constexpr Wei kWeiPerNative = 1'000'000'000'000'000'000ULL;
constexpr double kWeiPerGwei = 1e9;

/// 20-byte account / contract identifier.
struct Address {
  std::array<std::uint8_t, 20> bytes{};

  static const Address& zero();
  bool is_zero() const { return *this == zero(); }

  std::string hex() const;  // "0x" + 40 lowercase hex digits
  static std::optional<Address> from_hex(std::string_view text);

  auto operator<=>(const Address&) const = default;
};

/// Derives a deterministic address from an arbitrary label (fixtures, demo accounts).
Address address_from_label(std::string_view label);

struct Hash32 {
  std::array<std::uint8_t, 32> bytes{};
  std::string hex() const;
  static std::optional<Hash32> from_hex(std::string_view text);
  auto operator<=>(const Hash32&) const = default;
};

enum class Err {
  // token economy
  InsufficientBalance,
  ZeroAddressRecipient,
  InsufficientAllowance,
  NotOperator,
  InsufficientNative,
  ZeroPayment,
  DustPayment,
  InvalidBonusRate,
  NotOwner,
  NotAuthorized,
  NotApproved,
  AlreadyListed,
  ZeroPrice,
  NoListing,
  StaleListing,
  SelfPurchase,
  NotSeller,
  UnknownToken,
  // rewards
  InconsistentRecord,
  ImplausibleRecord,
  NotEarnable,
  NotPetOwner,
  // wallet
  InvalidEntropyLength,
  InvalidMnemonic,
  // ledger simulator
  NonceTooLow,
  NonceGap,
  InsufficientFunds,
  ClockRegression,
  GasLimitExceeded,
  NotConfirmed,
  UnknownContract,
  WrongStandard,
  // gateway
  Timeout,
  Reverted,
  EndpointUnreachable,
  // indexer
  GapDetected,
  DuplicateBlock,
  SchemaMismatch,
  CorruptSnapshot,
  // reporting / misc
  EmptySamples,
  UnknownFormat,
  BadArtifact,
  BadProfile,
  BadRequest,
  IoError,
};

std::string_view err_name(Err code);
std::optional<Err> err_from_name(std::string_view name);

struct Error {
  Err code;
  std::string detail;

  Error(Err c, std::string d = {}) : code(c), detail(std::move(d)) {}
  std::string to_string() const;
};

/// Minimal expected-style result. Holds either a value or an Error.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : store_(std::move(value)) {}
  Result(Error error) : store_(std::move(error)) {}
  Result(Err code, std::string detail = {}) : store_(Error(code, std::move(detail))) {}

  bool ok() const { return std::holds_alternative<T>(store_); }
  explicit operator bool() const { return ok(); }

  T& value() { return std::get<T>(store_); }
  const T& value() const { return std::get<T>(store_); }
  T& operator*() { return value(); }
  const T& operator*() const { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  const Error& error() const { return std::get<Error>(store_); }
  Err code() const { return error().code; }

 private:
  std::variant<T, Error> store_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)) {}
  Result(Err code, std::string detail = {}) : error_(Error(code, std::move(detail))) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Error& error() const { return *error_; }
  Err code() const { return error_->code; }

 private:
  std::optional<Error> error_;
};

using Status = Result<void>;

// ---- hex helpers ----
std::string to_hex(std::span<const std::uint8_t> bytes);  // no 0x prefix
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text);  // accepts 0x prefix

// ---- deterministic digests / seeding ----

/// FNV-1a 64-bit running digest over canonical byte feeds. Used for state
/// digests and seed derivation; not cryptographic.
class Digest {
 public:
  Digest& feed(std::span<const std::uint8_t> bytes);
  Digest& feed(std::string_view text);
  Digest& feed_u64(std::uint64_t v);  // big-endian
  Digest& feed(const Address& a) { return feed(std::span<const std::uint8_t>(a.bytes)); }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view lane);

/// Deterministic RNG with stdlib-independent integer/real mapping, so the same
/// seed yields the same draws on any platform.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64();
  /// Uniform integer in [lo, hi] inclusive.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi);
  /// Uniform real in [lo, hi).
  double uniform_real(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace w2e

template <>
struct std::hash<w2e::Address> {
  std::size_t operator()(const w2e::Address& a) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : a.bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

template <>
struct std::hash<w2e::Hash32> {
  std::size_t operator()(const w2e::Hash32& h32) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : h32.bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};
