#pragma once

// Independent replay model of the token rules. Deliberately dumb: plain maps
// mutated rule by rule, no sharing with the production code beyond the basic
// types. Tests run TokenEconomy and this model over the same scripts and
// require agreement on every outcome and on the final state.

#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "w2e/common.hpp"
#include "w2e/reward.hpp"
#include "w2e/token.hpp"

namespace w2e::testing {

struct OracleListing {
  Address seller;
  Amount price = 0;
  bool active = false;
};

class TokenOracle {
 public:
  TokenOracle(const Address& operatorAddr, const Address& marketAddr,
              Amount rateDmdPerNative = 1000)
      : op_(operatorAddr), market_(marketAddr), rate_(rateDmdPerNative) {}

  bool transfer(const Address& caller, const Address& to, Amount amount) {
    if (to.is_zero()) return false;
    if (bal_[caller] < amount) return false;
    bal_[caller] -= amount;
    bal_[to] += amount;
    return true;
  }

  bool approve(const Address& caller, const Address& spender, Amount amount) {
    allow_[{caller, spender}] = amount;
    return true;
  }

  bool transfer_from(const Address& spender, const Address& owner, const Address& to,
                     Amount amount) {
    if (to.is_zero()) return false;
    if (allow_[{owner, spender}] < amount) return false;
    if (bal_[owner] < amount) return false;
    allow_[{owner, spender}] -= amount;
    bal_[owner] -= amount;
    bal_[to] += amount;
    return true;
  }

  bool mint_dmd(const Address& caller, const Address& to, Amount amount) {
    if (caller != op_ || to.is_zero()) return false;
    supply_ += amount;
    bal_[to] += amount;
    return true;
  }

  bool buy_dmd(const Address& buyer, Wei paidWei) {
    if (paidWei == 0) return false;
    if (native_[buyer] < paidWei) return false;
    using u128 = unsigned __int128;
    const u128 credited = (u128)paidWei * rate_ / kWeiPerNative;
    if (credited == 0) return false;  // dust: charging for nothing is rejected
    native_[buyer] -= paidWei;
    native_[op_] += paidWei;  // treasury is the operator
    supply_ += static_cast<Amount>(credited);
    bal_[buyer] += static_cast<Amount>(credited);
    return true;
  }

  std::optional<TokenId> mint_pet(const Address& caller, const Address& to,
                                  std::uint32_t bonusPct) {
    if (caller != op_ || to.is_zero() || bonusPct < 100) return std::nullopt;
    const TokenId id = nextId_++;
    owner_[id] = to;
    bonus_[id] = bonusPct;
    return id;
  }

  bool approve_nft(const Address& caller, TokenId id, const Address& spender) {
    auto it = owner_.find(id);
    if (it == owner_.end() || it->second != caller) return false;
    if (spender.is_zero())
      approved_.erase(id);
    else
      approved_[id] = spender;
    return true;
  }

  bool transfer_nft(const Address& caller, const Address& from, const Address& to,
                    TokenId id) {
    if (to.is_zero()) return false;
    auto it = owner_.find(id);
    if (it == owner_.end() || it->second != from) return false;
    auto ap = approved_.find(id);
    const bool callerApproved = ap != approved_.end() && ap->second == caller;
    if (caller != from && !callerApproved) return false;
    it->second = to;
    approved_.erase(id);  // ownership change clears the per-token approval
    return true;
  }

  bool list_nft(const Address& seller, TokenId id, Amount price) {
    auto it = owner_.find(id);
    if (it == owner_.end() || it->second != seller) return false;
    auto ap = approved_.find(id);
    if (ap == approved_.end() || ap->second != market_) return false;
    if (price == 0) return false;
    auto li = listing_.find(id);
    if (li != listing_.end() && li->second.active) return false;
    listing_[id] = OracleListing{seller, price, true};
    return true;
  }

  bool buy_nft(const Address& buyer, TokenId id) {
    auto li = listing_.find(id);
    if (li == listing_.end() || !li->second.active) return false;
    const OracleListing listing = li->second;
    auto it = owner_.find(id);
    auto ap = approved_.find(id);
    // stale when the token moved or the market lost its approval
    if (it == owner_.end() || it->second != listing.seller) return false;
    if (ap == approved_.end() || ap->second != market_) return false;
    if (buyer == listing.seller) return false;
    if (bal_[buyer] < listing.price) return false;
    bal_[buyer] -= listing.price;
    bal_[listing.seller] += listing.price;
    it->second = buyer;
    approved_.erase(id);
    li->second.active = false;
    return true;
  }

  bool cancel_listing(const Address& seller, TokenId id) {
    auto li = listing_.find(id);
    if (li == listing_.end() || !li->second.active) return false;
    if (li->second.seller != seller) return false;
    li->second.active = false;
    return true;
  }

  bool grant_reward(const Address& user, TokenId pet, const WorkoutRecord& rec,
                    Amount baseRatePerKm = 10, double maxSpeed = 30.0,
                    double tolerance = 0.5) {
    auto it = owner_.find(pet);
    if (it == owner_.end() || it->second != user) return false;
    if (rec.durationSec == 0) return false;
    const double derived =
        (static_cast<double>(rec.distanceM) / 1000.0) /
        (static_cast<double>(rec.durationSec) / 3600.0);
    if (derived - rec.avgSpeedKmh > tolerance || rec.avgSpeedKmh - derived > tolerance)
      return false;
    if (rec.avgSpeedKmh > maxSpeed) return false;
    using u128 = unsigned __int128;
    const u128 base = (u128)rec.distanceM * baseRatePerKm / 1000u;
    const u128 total = base * bonus_.at(pet) / 100u;
    supply_ += static_cast<Amount>(total);
    bal_[user] += static_cast<Amount>(total);
    return true;
  }

  // credits native coin outside the rules, mirroring test faucets
  void faucet_native(const Address& a, Wei amount) { native_[a] += amount; }

  Amount balance(const Address& a) const {
    auto it = bal_.find(a);
    return it == bal_.end() ? 0 : it->second;
  }
  Amount allowance(const Address& o, const Address& s) const {
    auto it = allow_.find({o, s});
    return it == allow_.end() ? 0 : it->second;
  }
  Wei native(const Address& a) const {
    auto it = native_.find(a);
    return it == native_.end() ? 0 : it->second;
  }
  Amount supply() const { return supply_; }
  TokenId next_id() const { return nextId_; }
  const std::map<TokenId, Address>& owners() const { return owner_; }
  std::optional<Address> approved_for(TokenId id) const {
    auto it = approved_.find(id);
    if (it == approved_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<OracleListing> listing_of(TokenId id) const {
    auto it = listing_.find(id);
    if (it == listing_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Address op_, market_;
  Amount rate_;
  std::map<Address, Amount> bal_;
  std::map<std::pair<Address, Address>, Amount> allow_;
  Amount supply_ = 0;
  std::map<Address, Wei> native_;
  std::map<TokenId, Address> owner_;
  std::map<TokenId, Address> approved_;
  std::map<TokenId, std::uint32_t> bonus_;
  std::map<TokenId, OracleListing> listing_;
  TokenId nextId_ = 1;
};

// ---- shared script machinery ----

struct MarketAction {
  enum class Kind {
    Transfer,
    Approve,
    TransferFrom,
    MintDmd,
    BuyDmd,
    MintPet,
    ApproveNft,
    TransferNft,
    List,
    Buy,
    Cancel,
    Reward,
  };
  Kind kind = Kind::Transfer;
  Address a, b, c;  // actor / counterparty / third party, per kind
  Amount amount = 0;
  TokenId token = 0;
  std::uint32_t pct = 100;
  WorkoutRecord rec;
};

/// A plausible workout: distance drawn, duration back-solved so the claimed
/// speed is internally consistent and under the cap.
inline WorkoutRecord plausible_workout(DetRng& rng) {
  WorkoutRecord rec;
  rec.distanceM = rng.uniform_u64(0, 15'000);
  const double speed = 4.0 + rng.uniform_real(0.0, 10.0);  // km/h, well under 30
  rec.durationSec = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             (static_cast<double>(rec.distanceM) / 1000.0) / speed * 3600.0));
  rec.avgSpeedKmh = (static_cast<double>(rec.distanceM) / 1000.0) /
                    (static_cast<double>(rec.durationSec) / 3600.0);
  rec.steps = rec.distanceM + rng.uniform_u64(0, 500);
  rec.startedAt = 1'700'000'000 + static_cast<std::int64_t>(rng.uniform_u64(0, 86'400));
  return rec;
}

/// Random mixed-validity market session: actors, token ids and amounts are
/// drawn loosely, so a healthy share of actions violate a precondition.
inline std::vector<MarketAction> random_market_script(DetRng& rng,
                                                      std::span<const Address> users,
                                                      const Address& operatorAddr,
                                                      const Address& marketAddr,
                                                      std::size_t count) {
  std::vector<MarketAction> script;
  script.reserve(count);
  auto pick = [&](std::span<const Address> from) {
    return from[rng.uniform_u64(0, from.size() - 1)];
  };
  auto any_actor = [&]() {
    // mostly users, sometimes the operator (mints need it, others reject it)
    if (rng.uniform_u64(0, 9) == 0) return operatorAddr;
    return pick(users);
  };
  for (std::size_t i = 0; i < count; ++i) {
    MarketAction act;
    const auto roll = rng.uniform_u64(0, 99);
    if (roll < 12) {
      act.kind = MarketAction::Kind::Transfer;
      act.a = any_actor();
      act.b = pick(users);
      act.amount = rng.uniform_u64(0, 400);
    } else if (roll < 20) {
      act.kind = MarketAction::Kind::Approve;
      act.a = pick(users);
      act.b = pick(users);
      act.amount = rng.uniform_u64(0, 300);
    } else if (roll < 28) {
      act.kind = MarketAction::Kind::TransferFrom;
      act.a = pick(users);  // spender
      act.b = pick(users);  // owner
      act.c = pick(users);  // recipient
      act.amount = rng.uniform_u64(0, 300);
    } else if (roll < 38) {
      act.kind = MarketAction::Kind::MintDmd;
      act.a = any_actor();  // only the operator draw succeeds
      act.b = pick(users);
      act.amount = rng.uniform_u64(1, 1'000);
    } else if (roll < 43) {
      act.kind = MarketAction::Kind::BuyDmd;
      act.a = pick(users);
      // spans dust (floors to zero DMD) through whole-coin payments
      act.amount = rng.uniform_u64(1, 2 * kWeiPerNative / 1'000);
    } else if (roll < 53) {
      act.kind = MarketAction::Kind::MintPet;
      act.a = any_actor();
      act.b = pick(users);
      act.pct = static_cast<std::uint32_t>(rng.uniform_u64(95, 200));  // some invalid
    } else if (roll < 63) {
      act.kind = MarketAction::Kind::ApproveNft;
      act.a = pick(users);
      act.token = rng.uniform_u64(1, 40);
      // usually the marketplace, sometimes another user or a clearing zero
      const auto mode = rng.uniform_u64(0, 9);
      if (mode < 7)
        act.b = marketAddr;
      else if (mode < 9)
        act.b = pick(users);
      else
        act.b = Address::zero();
    } else if (roll < 68) {
      act.kind = MarketAction::Kind::TransferNft;
      act.a = pick(users);
      act.b = pick(users);
      act.c = pick(users);
      act.token = rng.uniform_u64(1, 40);
    } else if (roll < 78) {
      act.kind = MarketAction::Kind::List;
      act.a = pick(users);
      act.token = rng.uniform_u64(1, 40);
      act.amount = rng.uniform_u64(0, 250);  // zero price included
    } else if (roll < 88) {
      act.kind = MarketAction::Kind::Buy;
      act.a = pick(users);
      act.token = rng.uniform_u64(1, 40);
    } else if (roll < 94) {
      act.kind = MarketAction::Kind::Cancel;
      act.a = pick(users);
      act.token = rng.uniform_u64(1, 40);
    } else {
      act.kind = MarketAction::Kind::Reward;
      act.a = pick(users);
      act.token = rng.uniform_u64(1, 40);
      act.rec = plausible_workout(rng);
    }
    script.push_back(act);
  }
  return script;
}

inline Status economy_apply(TokenEconomy& eco, NativeLedger& native,
                            const MarketAction& act) {
  using K = MarketAction::Kind;
  switch (act.kind) {
    case K::Transfer:
      return eco.transfer(act.a, act.b, act.amount);
    case K::Approve:
      return eco.approve(act.a, act.b, act.amount);
    case K::TransferFrom:
      return eco.transfer_from(act.a, act.b, act.c, act.amount);
    case K::MintDmd:
      return eco.mint_dmd(act.a, act.b, act.amount);
    case K::BuyDmd: {
      auto r = eco.buy_dmd(native, act.a, act.amount);
      if (!r) return r.error();
      return {};
    }
    case K::MintPet: {
      auto r = eco.mint_pet(act.a, act.b, act.pct);
      if (!r) return r.error();
      return {};
    }
    case K::ApproveNft:
      return eco.approve_nft(act.a, act.token, act.b);
    case K::TransferNft:
      return eco.transfer_nft(act.a, act.b, act.c, act.token);
    case K::List:
      return eco.list_nft(act.a, act.token, act.amount);
    case K::Buy:
      return eco.buy_nft(act.a, act.token);
    case K::Cancel:
      return eco.cancel_listing(act.a, act.token);
    case K::Reward: {
      auto r = eco.grant_reward(act.a, act.token, act.rec);
      if (!r) return r.error();
      return {};
    }
  }
  return Error{Err::BadRequest, "unhandled action"};
}

inline bool oracle_apply(TokenOracle& oracle, const MarketAction& act) {
  using K = MarketAction::Kind;
  switch (act.kind) {
    case K::Transfer:
      return oracle.transfer(act.a, act.b, act.amount);
    case K::Approve:
      return oracle.approve(act.a, act.b, act.amount);
    case K::TransferFrom:
      return oracle.transfer_from(act.a, act.b, act.c, act.amount);
    case K::MintDmd:
      return oracle.mint_dmd(act.a, act.b, act.amount);
    case K::BuyDmd:
      return oracle.buy_dmd(act.a, act.amount);
    case K::MintPet:
      return oracle.mint_pet(act.a, act.b, act.pct).has_value();
    case K::ApproveNft:
      return oracle.approve_nft(act.a, act.token, act.b);
    case K::TransferNft:
      return oracle.transfer_nft(act.a, act.b, act.c, act.token);
    case K::List:
      return oracle.list_nft(act.a, act.token, act.amount);
    case K::Buy:
      return oracle.buy_nft(act.a, act.token);
    case K::Cancel:
      return oracle.cancel_listing(act.a, act.token);
    case K::Reward:
      return oracle.grant_reward(act.a, act.token, act.rec);
  }
  return false;
}

/// Full-state comparison. Returns an empty string when the states agree, or a
/// description of the first difference.
inline std::string compare_states(const TokenOracle& oracle, const TokenEconomy& eco,
                                  std::span<const Address> users) {
  std::ostringstream why;
  auto fail = [&]() -> std::string { return why.str(); };
  if (oracle.supply() != eco.total_supply()) {
    why << "totalSupply " << eco.total_supply() << " != oracle " << oracle.supply();
    return fail();
  }
  std::vector<Address> accounts(users.begin(), users.end());
  accounts.push_back(eco.operator_address());
  accounts.push_back(eco.market_address());
  for (const auto& a : accounts) {
    if (oracle.balance(a) != eco.balance_of(a)) {
      why << "balance(" << a.hex() << ") " << eco.balance_of(a) << " != oracle "
          << oracle.balance(a);
      return fail();
    }
    for (const auto& b : accounts) {
      if (oracle.allowance(a, b) != eco.allowance(a, b)) {
        why << "allowance(" << a.hex() << "," << b.hex() << ") " << eco.allowance(a, b)
            << " != oracle " << oracle.allowance(a, b);
        return fail();
      }
    }
  }
  if (oracle.next_id() != eco.minted_pets() + 1) {
    why << "minted " << eco.minted_pets() << " != oracle " << (oracle.next_id() - 1);
    return fail();
  }
  for (TokenId id = 1; id < oracle.next_id(); ++id) {
    const auto ecoOwner = eco.owner_of(id);
    const auto it = oracle.owners().find(id);
    if (!ecoOwner || it == oracle.owners().end() || *ecoOwner != it->second) {
      why << "owner_of(" << id << ") mismatch";
      return fail();
    }
    if (oracle.approved_for(id) != eco.approved_for(id)) {
      why << "approved_for(" << id << ") mismatch";
      return fail();
    }
    const auto ecoListing = eco.active_listing(id);
    const auto oListing = oracle.listing_of(id);
    const bool oActive = oListing && oListing->active;
    if (ecoListing.has_value() != oActive) {
      why << "listing activity(" << id << ") mismatch";
      return fail();
    }
    if (ecoListing && (ecoListing->seller != oListing->seller ||
                       ecoListing->priceDmd != oListing->price)) {
      why << "listing terms(" << id << ") mismatch";
      return fail();
    }
  }
  return {};
}

/// Native-coin comparison for scripts that include sale-desk purchases.
inline std::string compare_native(const TokenOracle& oracle, const NativeLedger& native,
                                  std::span<const Address> users, const Address& treasury) {
  std::vector<Address> accounts(users.begin(), users.end());
  accounts.push_back(treasury);
  for (const auto& a : accounts) {
    if (oracle.native(a) != native.balance(a)) {
      std::ostringstream why;
      why << "native(" << a.hex() << ") " << native.balance(a) << " != oracle "
          << oracle.native(a);
      return why.str();
    }
  }
  return {};
}

}  // namespace w2e::testing
