#include "w2e/common.hpp"

#include "w2e/crypto.hpp"

namespace w2e {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

const Address& Address::zero() {
  static const Address z{};
  return z;
}

std::string Address::hex() const {
  std::string out = "0x";
  out.reserve(42);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::optional<Address> Address::from_hex(std::string_view text) {
  auto raw = w2e::from_hex(text);
  if (!raw || raw->size() != 20) return std::nullopt;
  Address a;
  std::copy(raw->begin(), raw->end(), a.bytes.begin());
  return a;
}

Address address_from_label(std::string_view label) {
  auto h = sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
  Address a;
  std::copy_n(h.begin(), 20, a.bytes.begin());
  return a;
}

std::string Hash32::hex() const {
  std::string out = "0x";
  out.reserve(66);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::optional<Hash32> Hash32::from_hex(std::string_view text) {
  auto raw = w2e::from_hex(text);
  if (!raw || raw->size() != 32) return std::nullopt;
  Hash32 h;
  std::copy(raw->begin(), raw->end(), h.bytes.begin());
  return h;
}

namespace {
struct ErrName {
  Err code;
  std::string_view name;
};
constexpr ErrName kErrNames[] = {
    {Err::InsufficientBalance, "InsufficientBalance"},
    {Err::ZeroAddressRecipient, "ZeroAddressRecipient"},
    {Err::InsufficientAllowance, "InsufficientAllowance"},
    {Err::NotOperator, "NotOperator"},
    {Err::InsufficientNative, "InsufficientNative"},
    {Err::ZeroPayment, "ZeroPayment"},
    {Err::DustPayment, "DustPayment"},
    {Err::InvalidBonusRate, "InvalidBonusRate"},
    {Err::NotOwner, "NotOwner"},
    {Err::NotAuthorized, "NotAuthorized"},
    {Err::NotApproved, "NotApproved"},
    {Err::AlreadyListed, "AlreadyListed"},
    {Err::ZeroPrice, "ZeroPrice"},
    {Err::NoListing, "NoListing"},
    {Err::StaleListing, "StaleListing"},
    {Err::SelfPurchase, "SelfPurchase"},
    {Err::NotSeller, "NotSeller"},
    {Err::UnknownToken, "UnknownToken"},
    {Err::InconsistentRecord, "InconsistentRecord"},
    {Err::ImplausibleRecord, "ImplausibleRecord"},
    {Err::NotEarnable, "NotEarnable"},
    {Err::NotPetOwner, "NotPetOwner"},
    {Err::InvalidEntropyLength, "InvalidEntropyLength"},
    {Err::InvalidMnemonic, "InvalidMnemonic"},
    {Err::NonceTooLow, "NonceTooLow"},
    {Err::NonceGap, "NonceGap"},
    {Err::InsufficientFunds, "InsufficientFunds"},
    {Err::ClockRegression, "ClockRegression"},
    {Err::GasLimitExceeded, "GasLimitExceeded"},
    {Err::NotConfirmed, "NotConfirmed"},
    {Err::UnknownContract, "UnknownContract"},
    {Err::WrongStandard, "WrongStandard"},
    {Err::Timeout, "Timeout"},
    {Err::Reverted, "Reverted"},
    {Err::EndpointUnreachable, "EndpointUnreachable"},
    {Err::GapDetected, "GapDetected"},
    {Err::DuplicateBlock, "DuplicateBlock"},
    {Err::SchemaMismatch, "SchemaMismatch"},
    {Err::CorruptSnapshot, "CorruptSnapshot"},
    {Err::EmptySamples, "EmptySamples"},
    {Err::UnknownFormat, "UnknownFormat"},
    {Err::BadArtifact, "BadArtifact"},
    {Err::BadProfile, "BadProfile"},
    {Err::BadRequest, "BadRequest"},
    {Err::IoError, "IoError"},
};
}  // namespace

std::string_view err_name(Err code) {
  for (const auto& e : kErrNames) {
    if (e.code == code) return e.name;
  }
  return "Unknown";
}

std::optional<Err> err_from_name(std::string_view name) {
  for (const auto& e : kErrNames) {
    if (e.name == name) return e.code;
  }
  return std::nullopt;
}

std::string Error::to_string() const {
  std::string out(err_name(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.size() % 2 != 0) return std::nullopt;
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_nibble(text[i]);
    int lo = hex_nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Digest& Digest::feed(std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Digest& Digest::feed(std::string_view text) {
  return feed(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest& Digest::feed_u64(std::uint64_t v) {
  std::array<std::uint8_t, 8> buf;
  for (int i = 7; i >= 0; --i) {
    buf[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return feed(std::span<const std::uint8_t>(buf));
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view lane) {
  Digest d;
  d.feed_u64(seed).feed(lane);
  std::uint64_t v = d.value();
  return v ? v : 0x9e3779b97f4a7c15ULL;
}

std::uint64_t DetRng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t DetRng::uniform_u64(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  std::uint64_t span = hi - lo + 1;
  return lo + next_u64() % span;
}

double DetRng::uniform_real(double lo, double hi) {
  double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

}  // namespace w2e
