#include "w2e/token.hpp"

#include "w2e/crypto.hpp"

namespace w2e {

using nlohmann::json;

Wei MapNativeLedger::balance(const Address& account) const {
  auto it = balances_.find(account);
  return it == balances_.end() ? 0 : it->second;
}

bool MapNativeLedger::move(const Address& from, const Address& to, Wei amount) {
  auto it = balances_.find(from);
  if (it == balances_.end() || it->second < amount) return false;
  it->second -= amount;
  balances_[to] += amount;
  return true;
}

void MapNativeLedger::credit(const Address& account, Wei amount) {
  balances_[account] += amount;
}

json MapNativeLedger::to_json() const {
  json j = json::object();
  for (const auto& [addr, wei] : balances_) j[addr.hex()] = wei;
  return j;
}

Result<MapNativeLedger> MapNativeLedger::from_json(const json& j) {
  MapNativeLedger out;
  if (!j.is_object()) return Error(Err::BadRequest, "native ledger must be an object");
  for (const auto& [key, val] : j.items()) {
    auto addr = Address::from_hex(key);
    if (!addr || !val.is_number_unsigned()) {
      return Error(Err::BadRequest, "bad native ledger entry");
    }
    out.balances_[*addr] = val.get<Wei>();
  }
  return out;
}

TokenEconomy::TokenEconomy(const Address& operatorAddr, Amount rateDmdPerNative,
                           RewardParams rewardParams)
    : operator_(operatorAddr),
      treasury_(operatorAddr),
      market_(address_from_label("w2e/marketplace/" + operatorAddr.hex())),
      rateDmdPerNative_(rateDmdPerNative),
      rewardParams_(rewardParams) {}

Status TokenEconomy::move_dmd(const Address& from, const Address& to, Amount amount) {
  auto it = balances_.find(from);
  Amount have = it == balances_.end() ? 0 : it->second;
  if (have < amount) return Error(Err::InsufficientBalance);
  if (it != balances_.end()) it->second -= amount;
  balances_[to] += amount;
  return {};
}

Status TokenEconomy::transfer(const Address& caller, const Address& to, Amount amount) {
  if (to.is_zero()) return Error(Err::ZeroAddressRecipient);
  if (auto s = move_dmd(caller, to, amount); !s) return s;
  events_.push_back(TransferEvent{caller, to, amount});
  return {};
}

Status TokenEconomy::approve(const Address& caller, const Address& spender, Amount amount) {
  allowances_[{caller, spender}] = amount;  // overwrite, not add
  events_.push_back(ApprovalEvent{caller, spender, amount});
  return {};
}

Status TokenEconomy::transfer_from(const Address& spender, const Address& owner,
                                   const Address& to, Amount amount) {
  if (to.is_zero()) return Error(Err::ZeroAddressRecipient);
  auto it = allowances_.find({owner, spender});
  Amount allowed = it == allowances_.end() ? 0 : it->second;
  if (allowed < amount) return Error(Err::InsufficientAllowance);
  if (balance_of(owner) < amount) return Error(Err::InsufficientBalance);
  if (it != allowances_.end()) it->second = allowed - amount;
  (void)move_dmd(owner, to, amount);
  events_.push_back(TransferEvent{owner, to, amount});
  return {};
}

Status TokenEconomy::mint_dmd(const Address& caller, const Address& to, Amount amount) {
  if (caller != operator_) return Error(Err::NotOperator);
  if (to.is_zero()) return Error(Err::ZeroAddressRecipient);
  totalSupply_ += amount;
  balances_[to] += amount;
  events_.push_back(TransferEvent{Address::zero(), to, amount});
  return {};
}

Result<Amount> TokenEconomy::buy_dmd(NativeLedger& native, const Address& buyer,
                                     Wei nativePaidWei) {
  if (nativePaidWei == 0) return Error(Err::ZeroPayment);
  if (native.balance(buyer) < nativePaidWei) return Error(Err::InsufficientNative);
  using u128 = unsigned __int128;
  u128 credited = (u128)nativePaidWei * rateDmdPerNative_ / kWeiPerNative;
  // Never charge native coin for zero DMD credit.
  if (credited == 0) return Error(Err::DustPayment);
  if (!native.move(buyer, treasury_, nativePaidWei)) return Error(Err::InsufficientNative);
  Amount dmd = static_cast<Amount>(credited);
  totalSupply_ += dmd;
  balances_[buyer] += dmd;
  events_.push_back(TransferEvent{Address::zero(), buyer, dmd});
  return dmd;
}

Result<TokenId> TokenEconomy::mint_pet(const Address& caller, const Address& to,
                                       std::uint32_t bonusRatePct) {
  if (caller != operator_) return Error(Err::NotOperator);
  if (to.is_zero()) return Error(Err::ZeroAddressRecipient);
  if (bonusRatePct < 100) return Error(Err::InvalidBonusRate);
  TokenId id = nextTokenId_++;
  ownerOf_[id] = to;
  bonusRate_[id] = bonusRatePct;
  ownedCount_[to] += 1;
  events_.push_back(NftTransferEvent{id, Address::zero(), to});
  return id;
}

Status TokenEconomy::approve_nft(const Address& caller, TokenId tokenId,
                                 const Address& spender) {
  auto owner = owner_of(tokenId);
  if (!owner) return Error(Err::UnknownToken);
  if (*owner != caller) return Error(Err::NotOwner);
  if (spender.is_zero()) {
    approvals_.erase(tokenId);
  } else {
    approvals_[tokenId] = spender;
  }
  events_.push_back(NftApprovalEvent{tokenId, caller, spender});
  return {};
}

Status TokenEconomy::move_nft(const Address& from, const Address& to, TokenId tokenId) {
  ownerOf_[tokenId] = to;
  approvals_.erase(tokenId);  // transfer resets the per-token approval
  auto& fromCount = ownedCount_[from];
  if (fromCount > 0) fromCount -= 1;
  ownedCount_[to] += 1;
  return {};
}

Status TokenEconomy::transfer_nft(const Address& caller, const Address& from,
                                  const Address& to, TokenId tokenId) {
  if (to.is_zero()) return Error(Err::ZeroAddressRecipient);
  auto owner = owner_of(tokenId);
  if (!owner) return Error(Err::UnknownToken);
  if (*owner != from) return Error(Err::NotOwner);
  auto approved = approved_for(tokenId);
  if (caller != from && !(approved && *approved == caller)) {
    return Error(Err::NotAuthorized);
  }
  (void)move_nft(from, to, tokenId);
  events_.push_back(NftTransferEvent{tokenId, from, to});
  return {};
}

Status TokenEconomy::list_nft(const Address& seller, TokenId tokenId, Amount priceDmd) {
  auto owner = owner_of(tokenId);
  if (!owner) return Error(Err::UnknownToken);
  if (*owner != seller) return Error(Err::NotOwner);
  auto approved = approved_for(tokenId);
  if (!approved || *approved != market_) return Error(Err::NotApproved);
  if (priceDmd == 0) return Error(Err::ZeroPrice);
  if (auto existing = active_listing(tokenId)) return Error(Err::AlreadyListed);
  listings_[tokenId] = Listing{seller, priceDmd, true};
  events_.push_back(ListedEvent{tokenId, seller, priceDmd});
  return {};
}

Status TokenEconomy::buy_nft(const Address& buyer, TokenId tokenId) {
  auto it = listings_.find(tokenId);
  if (it == listings_.end() || !it->second.active) return Error(Err::NoListing);
  const Listing listing = it->second;
  auto owner = owner_of(tokenId);
  auto approved = approved_for(tokenId);
  // The token stays with the seller while listed; if it moved or the market
  // lost its approval the listing is stale.
  if (!owner || *owner != listing.seller || !approved || *approved != market_) {
    return Error(Err::StaleListing);
  }
  if (buyer == listing.seller) return Error(Err::SelfPurchase);
  if (balance_of(buyer) < listing.priceDmd) return Error(Err::InsufficientBalance);

  (void)move_dmd(buyer, listing.seller, listing.priceDmd);
  (void)move_nft(listing.seller, buyer, tokenId);
  it->second.active = false;
  events_.push_back(TransferEvent{buyer, listing.seller, listing.priceDmd});
  events_.push_back(NftTransferEvent{tokenId, listing.seller, buyer});
  events_.push_back(PurchasedEvent{tokenId, listing.seller, buyer, listing.priceDmd});
  return {};
}

Status TokenEconomy::cancel_listing(const Address& seller, TokenId tokenId) {
  auto it = listings_.find(tokenId);
  if (it == listings_.end() || !it->second.active) return Error(Err::NoListing);
  if (it->second.seller != seller) return Error(Err::NotSeller);
  it->second.active = false;
  events_.push_back(CancelledEvent{tokenId, seller});
  return {};
}

bool TokenEconomy::is_earnable(const Address& user) const {
  return pet_count(user) >= 1;
}

Result<RewardGrant> TokenEconomy::grant_reward(const Address& user, TokenId petTokenId,
                                               const WorkoutRecord& record) {
  if (!is_earnable(user)) return Error(Err::NotEarnable);
  auto owner = owner_of(petTokenId);
  if (!owner || *owner != user) return Error(Err::NotPetOwner);
  std::uint32_t bonus = bonusRate_.at(petTokenId);
  auto amounts = compute_reward(record, bonus, rewardParams_);
  if (!amounts) return amounts.error();

  RewardGrant grant;
  grant.user = user;
  grant.petTokenId = petTokenId;
  grant.baseDmd = amounts->baseDmd;
  grant.bonusRatePct = bonus;
  grant.totalDmd = amounts->totalDmd;
  grant.record = record;

  totalSupply_ += grant.totalDmd;
  balances_[user] += grant.totalDmd;
  events_.push_back(TransferEvent{Address::zero(), user, grant.totalDmd});
  events_.push_back(RewardedEvent{grant});
  return grant;
}

Amount TokenEconomy::balance_of(const Address& account) const {
  auto it = balances_.find(account);
  return it == balances_.end() ? 0 : it->second;
}

Amount TokenEconomy::allowance(const Address& owner, const Address& spender) const {
  auto it = allowances_.find({owner, spender});
  return it == allowances_.end() ? 0 : it->second;
}

std::optional<Address> TokenEconomy::owner_of(TokenId tokenId) const {
  auto it = ownerOf_.find(tokenId);
  if (it == ownerOf_.end()) return std::nullopt;
  return it->second;
}

std::optional<Address> TokenEconomy::approved_for(TokenId tokenId) const {
  auto it = approvals_.find(tokenId);
  if (it == approvals_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> TokenEconomy::pet_bonus_rate(TokenId tokenId) const {
  auto it = bonusRate_.find(tokenId);
  if (it == bonusRate_.end()) return std::nullopt;
  return it->second;
}

std::optional<Listing> TokenEconomy::active_listing(TokenId tokenId) const {
  auto it = listings_.find(tokenId);
  if (it == listings_.end() || !it->second.active) return std::nullopt;
  return it->second;
}

std::size_t TokenEconomy::pet_count(const Address& account) const {
  auto it = ownedCount_.find(account);
  return it == ownedCount_.end() ? 0 : static_cast<std::size_t>(it->second);
}

std::vector<TokenId> TokenEconomy::pets_of(const Address& account) const {
  std::vector<TokenId> out;
  for (const auto& [id, owner] : ownerOf_) {
    if (owner == account) out.push_back(id);
  }
  return out;
}

std::vector<Event> TokenEconomy::drain_events() {
  std::vector<Event> out;
  out.swap(events_);
  return out;
}

std::uint64_t TokenEconomy::state_digest() const {
  Digest d;
  d.feed("economy");
  d.feed(operator_).feed(treasury_).feed_u64(rateDmdPerNative_);
  d.feed_u64(totalSupply_);
  for (const auto& [addr, amount] : balances_) {
    if (amount == 0) continue;
    d.feed(addr).feed_u64(amount);
  }
  for (const auto& [key, amount] : allowances_) {
    if (amount == 0) continue;
    d.feed(key.first).feed(key.second).feed_u64(amount);
  }
  d.feed_u64(nextTokenId_);
  for (const auto& [id, owner] : ownerOf_) {
    d.feed_u64(id).feed(owner).feed_u64(bonusRate_.at(id));
  }
  for (const auto& [id, spender] : approvals_) {
    d.feed("approval").feed_u64(id).feed(spender);
  }
  for (const auto& [id, listing] : listings_) {
    if (!listing.active) continue;
    d.feed("listing").feed_u64(id).feed(listing.seller).feed_u64(listing.priceDmd);
  }
  return d.value();
}

json TokenEconomy::to_json() const {
  json j;
  j["schema"] = 1;
  j["operator"] = operator_.hex();
  j["treasury"] = treasury_.hex();
  j["rateDmdPerNative"] = rateDmdPerNative_;
  j["rewardParams"] = {{"baseRateDmdPerKm", rewardParams_.baseRateDmdPerKm},
                       {"maxAvgSpeedKmh", rewardParams_.maxAvgSpeedKmh},
                       {"speedToleranceKmh", rewardParams_.speedToleranceKmh}};
  j["totalSupply"] = totalSupply_;
  json balances = json::object();
  for (const auto& [addr, amount] : balances_) {
    if (amount) balances[addr.hex()] = amount;
  }
  j["balances"] = std::move(balances);
  json allowances = json::array();
  for (const auto& [key, amount] : allowances_) {
    if (amount) {
      allowances.push_back(
          {{"owner", key.first.hex()}, {"spender", key.second.hex()}, {"amount", amount}});
    }
  }
  j["allowances"] = std::move(allowances);
  j["nextTokenId"] = nextTokenId_;
  json pets = json::array();
  for (const auto& [id, owner] : ownerOf_) {
    json p = {{"tokenId", id}, {"owner", owner.hex()}, {"bonusRatePct", bonusRate_.at(id)}};
    if (auto ap = approved_for(id)) p["approved"] = ap->hex();
    pets.push_back(std::move(p));
  }
  j["pets"] = std::move(pets);
  json listings = json::array();
  for (const auto& [id, listing] : listings_) {
    if (!listing.active) continue;
    listings.push_back({{"tokenId", id},
                        {"seller", listing.seller.hex()},
                        {"priceDmd", listing.priceDmd}});
  }
  j["listings"] = std::move(listings);
  return j;
}

Result<TokenEconomy> TokenEconomy::from_json(const json& j) {
  try {
    if (j.value("schema", 0) != 1) return Error(Err::SchemaMismatch, "economy schema");
    auto op = Address::from_hex(j.at("operator").get<std::string>());
    if (!op) return Error(Err::BadRequest, "bad operator address");
    RewardParams params;
    if (j.contains("rewardParams")) {
      const auto& rp = j.at("rewardParams");
      params.baseRateDmdPerKm = rp.value("baseRateDmdPerKm", params.baseRateDmdPerKm);
      params.maxAvgSpeedKmh = rp.value("maxAvgSpeedKmh", params.maxAvgSpeedKmh);
      params.speedToleranceKmh = rp.value("speedToleranceKmh", params.speedToleranceKmh);
    }
    TokenEconomy e(*op, j.value("rateDmdPerNative", Amount(1000)), params);
    if (auto tr = Address::from_hex(j.value("treasury", op->hex()))) e.treasury_ = *tr;
    e.totalSupply_ = j.value("totalSupply", Amount(0));
    const json balances = j.value("balances", json::object());
    for (const auto& [key, val] : balances.items()) {
      auto addr = Address::from_hex(key);
      if (!addr) return Error(Err::BadRequest, "bad balance address");
      e.balances_[*addr] = val.get<Amount>();
    }
    for (const auto& a : j.value("allowances", json::array())) {
      auto owner = Address::from_hex(a.at("owner").get<std::string>());
      auto spender = Address::from_hex(a.at("spender").get<std::string>());
      if (!owner || !spender) return Error(Err::BadRequest, "bad allowance entry");
      e.allowances_[{*owner, *spender}] = a.at("amount").get<Amount>();
    }
    e.nextTokenId_ = j.value("nextTokenId", TokenId(1));
    for (const auto& p : j.value("pets", json::array())) {
      TokenId id = p.at("tokenId").get<TokenId>();
      auto owner = Address::from_hex(p.at("owner").get<std::string>());
      if (!owner) return Error(Err::BadRequest, "bad pet owner");
      e.ownerOf_[id] = *owner;
      e.bonusRate_[id] = p.at("bonusRatePct").get<std::uint32_t>();
      e.ownedCount_[*owner] += 1;
      if (p.contains("approved")) {
        auto ap = Address::from_hex(p.at("approved").get<std::string>());
        if (!ap) return Error(Err::BadRequest, "bad pet approval");
        e.approvals_[id] = *ap;
      }
    }
    for (const auto& l : j.value("listings", json::array())) {
      TokenId id = l.at("tokenId").get<TokenId>();
      auto seller = Address::from_hex(l.at("seller").get<std::string>());
      if (!seller) return Error(Err::BadRequest, "bad listing seller");
      e.listings_[id] = Listing{*seller, l.at("priceDmd").get<Amount>(), true};
    }
    return e;
  } catch (const json::exception& ex) {
    return Error(Err::BadRequest, std::string("economy parse: ") + ex.what());
  }
}

}  // namespace w2e
