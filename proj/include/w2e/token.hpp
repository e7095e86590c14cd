#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/events.hpp"
#include "w2e/reward.hpp"

namespace w2e {

/// Native-coin balance access, injected into the operations that touch the
/// chain's own currency (the DMD sale desk). Backed by the ledger simulator's
/// account table in chain contexts and by MapNativeLedger standalone.
class NativeLedger {
 public:
  virtual ~NativeLedger() = default;
  virtual Wei balance(const Address& account) const = 0;
  /// Moves `amount` wei; returns false (and changes nothing) on insufficient funds.
  virtual bool move(const Address& from, const Address& to, Wei amount) = 0;
};

class MapNativeLedger : public NativeLedger {
 public:
  Wei balance(const Address& account) const override;
  bool move(const Address& from, const Address& to, Wei amount) override;
  void credit(const Address& account, Wei amount);

  nlohmann::json to_json() const;
  static Result<MapNativeLedger> from_json(const nlohmann::json& j);

 private:
  std::map<Address, Wei> balances_;
};

struct Listing {
  Address seller;
  Amount priceDmd = 0;
  bool active = false;

  auto operator<=>(const Listing&) const = default;
};

/// The W2E contract state machine: DMD fungible balances and allowances,
/// pet NFTs with per-token bonus rates, the DMD-priced marketplace, the
/// native-coin sale desk, and workout reward grants.
///
/// Single-writer: mutating operations must be serialized by the caller.
/// Every operation either fully applies (appending its events) or fails with
/// no state change. Token ids are assigned sequentially starting at 1.
class TokenEconomy {
 public:
  explicit TokenEconomy(const Address& operatorAddr,
                        Amount rateDmdPerNative = 1000,
                        RewardParams rewardParams = {});

  // ---- ERC-20 surface ----
  Status transfer(const Address& caller, const Address& to, Amount amount);
  Status approve(const Address& caller, const Address& spender, Amount amount);
  Status transfer_from(const Address& spender, const Address& owner, const Address& to,
                       Amount amount);
  Status mint_dmd(const Address& caller, const Address& to, Amount amount);

  // ---- sale desk ----
  /// Converts a native payment to DMD at rateDmdPerNative per whole coin,
  /// flooring to base units; payments that floor to zero are rejected before
  /// any native coin moves. Returns the credited DMD.
  Result<Amount> buy_dmd(NativeLedger& native, const Address& buyer, Wei nativePaidWei);

  // ---- ERC-721 surface ----
  Result<TokenId> mint_pet(const Address& caller, const Address& to,
                           std::uint32_t bonusRatePct);
  Status approve_nft(const Address& caller, TokenId tokenId, const Address& spender);
  Status transfer_nft(const Address& caller, const Address& from, const Address& to,
                      TokenId tokenId);

  // ---- marketplace ----
  Status list_nft(const Address& seller, TokenId tokenId, Amount priceDmd);
  Status buy_nft(const Address& buyer, TokenId tokenId);
  Status cancel_listing(const Address& seller, TokenId tokenId);

  // ---- rewards ----
  bool is_earnable(const Address& user) const;
  Result<RewardGrant> grant_reward(const Address& user, TokenId petTokenId,
                                   const WorkoutRecord& record);

  // ---- views ----
  Amount balance_of(const Address& account) const;
  Amount allowance(const Address& owner, const Address& spender) const;
  Amount total_supply() const { return totalSupply_; }
  std::optional<Address> owner_of(TokenId tokenId) const;
  std::optional<Address> approved_for(TokenId tokenId) const;
  std::optional<std::uint32_t> pet_bonus_rate(TokenId tokenId) const;
  std::optional<Listing> active_listing(TokenId tokenId) const;
  std::size_t pet_count(const Address& account) const;
  std::vector<TokenId> pets_of(const Address& account) const;
  TokenId minted_pets() const { return nextTokenId_ - 1; }

  const Address& operator_address() const { return operator_; }
  const Address& treasury() const { return treasury_; }
  /// Synthetic address the marketplace acts under; listings require the
  /// per-token approval to be set to it.
  const Address& market_address() const { return market_; }
  Amount rate_dmd_per_native() const { return rateDmdPerNative_; }
  const RewardParams& reward_params() const { return rewardParams_; }

  /// Events appended by operations since the last drain, in order.
  std::vector<Event> drain_events();
  std::size_t pending_event_count() const { return events_.size(); }

  /// Order-independent digest of the full economy state.
  std::uint64_t state_digest() const;

  nlohmann::json to_json() const;
  static Result<TokenEconomy> from_json(const nlohmann::json& j);

 private:
  Status move_dmd(const Address& from, const Address& to, Amount amount);
  Status move_nft(const Address& from, const Address& to, TokenId tokenId);

  Address operator_;
  Address treasury_;
  Address market_;
  Amount rateDmdPerNative_;
  RewardParams rewardParams_;

  std::map<Address, Amount> balances_;
  std::map<std::pair<Address, Address>, Amount> allowances_;
  Amount totalSupply_ = 0;

  std::map<TokenId, Address> ownerOf_;
  std::map<TokenId, Address> approvals_;
  std::map<TokenId, std::uint32_t> bonusRate_;
  std::map<Address, std::uint64_t> ownedCount_;
  TokenId nextTokenId_ = 1;

  std::map<TokenId, Listing> listings_;

  std::vector<Event> events_;
};

}  // namespace w2e
