#include "w2e/events.hpp"

namespace w2e {

namespace {

using nlohmann::json;

json addr_json(const Address& a) { return a.hex(); }

Result<Address> addr_from(const json& j) {
  if (!j.is_string()) return Error(Err::BadRequest, "address must be a hex string");
  auto a = Address::from_hex(j.get<std::string>());
  if (!a) return Error(Err::BadRequest, "malformed address");
  return *a;
}

template <typename T>
Result<T> field(const json& j, const char* key) {
  if (!j.contains(key)) return Error(Err::BadRequest, std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    return Error(Err::BadRequest, std::string("bad field ") + key);
  }
}

}  // namespace

EventKind kind_of(const Event& e) {
  return std::visit(
      [](const auto& v) -> EventKind {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TransferEvent>) return EventKind::Transfer;
        if constexpr (std::is_same_v<T, ApprovalEvent>) return EventKind::Approval;
        if constexpr (std::is_same_v<T, NftTransferEvent>) return EventKind::NftTransfer;
        if constexpr (std::is_same_v<T, NftApprovalEvent>) return EventKind::NftApproval;
        if constexpr (std::is_same_v<T, ListedEvent>) return EventKind::Listed;
        if constexpr (std::is_same_v<T, PurchasedEvent>) return EventKind::Purchased;
        if constexpr (std::is_same_v<T, CancelledEvent>) return EventKind::Cancelled;
        if constexpr (std::is_same_v<T, RewardedEvent>) return EventKind::Rewarded;
      },
      e);
}

std::string_view kind_name(EventKind k) {
  switch (k) {
    case EventKind::Transfer: return "Transfer";
    case EventKind::Approval: return "Approval";
    case EventKind::NftTransfer: return "NftTransfer";
    case EventKind::NftApproval: return "NftApproval";
    case EventKind::Listed: return "Listed";
    case EventKind::Purchased: return "Purchased";
    case EventKind::Cancelled: return "Cancelled";
    case EventKind::Rewarded: return "Rewarded";
  }
  return "Unknown";
}

nlohmann::json record_to_json(const WorkoutRecord& r) {
  return json{{"durationSec", r.durationSec}, {"distanceM", r.distanceM},
              {"avgSpeedKmh", r.avgSpeedKmh}, {"steps", r.steps},
              {"startedAt", r.startedAt}};
}

Result<WorkoutRecord> record_from_json(const nlohmann::json& j) {
  WorkoutRecord r;
  auto dur = field<std::uint64_t>(j, "durationSec");
  if (!dur) return dur.error();
  auto dist = field<std::uint64_t>(j, "distanceM");
  if (!dist) return dist.error();
  auto spd = field<double>(j, "avgSpeedKmh");
  if (!spd) return spd.error();
  auto steps = field<std::uint64_t>(j, "steps");
  if (!steps) return steps.error();
  auto started = field<std::int64_t>(j, "startedAt");
  if (!started) return started.error();
  r.durationSec = *dur;
  r.distanceM = *dist;
  r.avgSpeedKmh = *spd;
  r.steps = *steps;
  r.startedAt = *started;
  return r;
}

nlohmann::json grant_to_json(const RewardGrant& g) {
  return json{{"user", g.user.hex()},       {"petTokenId", g.petTokenId},
              {"baseDmd", g.baseDmd},       {"bonusRatePct", g.bonusRatePct},
              {"totalDmd", g.totalDmd},     {"record", record_to_json(g.record)}};
}

Result<RewardGrant> grant_from_json(const nlohmann::json& j) {
  RewardGrant g;
  auto user = addr_from(j.value("user", json()));
  if (!user) return user.error();
  g.user = *user;
  auto pet = field<TokenId>(j, "petTokenId");
  if (!pet) return pet.error();
  g.petTokenId = *pet;
  auto base = field<Amount>(j, "baseDmd");
  if (!base) return base.error();
  g.baseDmd = *base;
  auto bonus = field<std::uint32_t>(j, "bonusRatePct");
  if (!bonus) return bonus.error();
  g.bonusRatePct = *bonus;
  auto total = field<Amount>(j, "totalDmd");
  if (!total) return total.error();
  g.totalDmd = *total;
  if (!j.contains("record")) return Error(Err::BadRequest, "missing field record");
  auto rec = record_from_json(j.at("record"));
  if (!rec) return rec.error();
  g.record = *rec;
  return g;
}

nlohmann::json event_to_json(const Event& e) {
  json j;
  j["kind"] = std::string(kind_name(kind_of(e)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TransferEvent>) {
          j["from"] = addr_json(v.from);
          j["to"] = addr_json(v.to);
          j["amount"] = v.amount;
        } else if constexpr (std::is_same_v<T, ApprovalEvent>) {
          j["owner"] = addr_json(v.owner);
          j["spender"] = addr_json(v.spender);
          j["amount"] = v.amount;
        } else if constexpr (std::is_same_v<T, NftTransferEvent>) {
          j["tokenId"] = v.tokenId;
          j["from"] = addr_json(v.from);
          j["to"] = addr_json(v.to);
        } else if constexpr (std::is_same_v<T, NftApprovalEvent>) {
          j["tokenId"] = v.tokenId;
          j["owner"] = addr_json(v.owner);
          j["approved"] = addr_json(v.approved);
        } else if constexpr (std::is_same_v<T, ListedEvent>) {
          j["tokenId"] = v.tokenId;
          j["seller"] = addr_json(v.seller);
          j["priceDmd"] = v.priceDmd;
        } else if constexpr (std::is_same_v<T, PurchasedEvent>) {
          j["tokenId"] = v.tokenId;
          j["seller"] = addr_json(v.seller);
          j["buyer"] = addr_json(v.buyer);
          j["priceDmd"] = v.priceDmd;
        } else if constexpr (std::is_same_v<T, CancelledEvent>) {
          j["tokenId"] = v.tokenId;
          j["seller"] = addr_json(v.seller);
        } else if constexpr (std::is_same_v<T, RewardedEvent>) {
          j["grant"] = grant_to_json(v.grant);
        }
      },
      e);
  return j;
}

Result<Event> event_from_json(const nlohmann::json& j) {
  auto kind = field<std::string>(j, "kind");
  if (!kind) return kind.error();
  const std::string& k = *kind;
  if (k == "Transfer") {
    TransferEvent e;
    auto from = addr_from(j.value("from", json()));
    auto to = addr_from(j.value("to", json()));
    auto amount = field<Amount>(j, "amount");
    if (!from) return from.error();
    if (!to) return to.error();
    if (!amount) return amount.error();
    e.from = *from;
    e.to = *to;
    e.amount = *amount;
    return Event(e);
  }
  if (k == "Approval") {
    ApprovalEvent e;
    auto owner = addr_from(j.value("owner", json()));
    auto spender = addr_from(j.value("spender", json()));
    auto amount = field<Amount>(j, "amount");
    if (!owner) return owner.error();
    if (!spender) return spender.error();
    if (!amount) return amount.error();
    e.owner = *owner;
    e.spender = *spender;
    e.amount = *amount;
    return Event(e);
  }
  if (k == "NftTransfer") {
    NftTransferEvent e;
    auto id = field<TokenId>(j, "tokenId");
    auto from = addr_from(j.value("from", json()));
    auto to = addr_from(j.value("to", json()));
    if (!id) return id.error();
    if (!from) return from.error();
    if (!to) return to.error();
    e.tokenId = *id;
    e.from = *from;
    e.to = *to;
    return Event(e);
  }
  if (k == "NftApproval") {
    NftApprovalEvent e;
    auto id = field<TokenId>(j, "tokenId");
    auto owner = addr_from(j.value("owner", json()));
    auto approved = addr_from(j.value("approved", json()));
    if (!id) return id.error();
    if (!owner) return owner.error();
    if (!approved) return approved.error();
    e.tokenId = *id;
    e.owner = *owner;
    e.approved = *approved;
    return Event(e);
  }
  if (k == "Listed") {
    ListedEvent e;
    auto id = field<TokenId>(j, "tokenId");
    auto seller = addr_from(j.value("seller", json()));
    auto price = field<Amount>(j, "priceDmd");
    if (!id) return id.error();
    if (!seller) return seller.error();
    if (!price) return price.error();
    e.tokenId = *id;
    e.seller = *seller;
    e.priceDmd = *price;
    return Event(e);
  }
  if (k == "Purchased") {
    PurchasedEvent e;
    auto id = field<TokenId>(j, "tokenId");
    auto seller = addr_from(j.value("seller", json()));
    auto buyer = addr_from(j.value("buyer", json()));
    auto price = field<Amount>(j, "priceDmd");
    if (!id) return id.error();
    if (!seller) return seller.error();
    if (!buyer) return buyer.error();
    if (!price) return price.error();
    e.tokenId = *id;
    e.seller = *seller;
    e.buyer = *buyer;
    e.priceDmd = *price;
    return Event(e);
  }
  if (k == "Cancelled") {
    CancelledEvent e;
    auto id = field<TokenId>(j, "tokenId");
    auto seller = addr_from(j.value("seller", json()));
    if (!id) return id.error();
    if (!seller) return seller.error();
    e.tokenId = *id;
    e.seller = *seller;
    return Event(e);
  }
  if (k == "Rewarded") {
    if (!j.contains("grant")) return Error(Err::BadRequest, "missing field grant");
    auto g = grant_from_json(j.at("grant"));
    if (!g) return g.error();
    return Event(RewardedEvent{*g});
  }
  return Error(Err::BadRequest, "unknown event kind " + k);
}

nlohmann::json stamped_to_json(const StampedEvent& e) {
  json j = event_to_json(e.body);
  j["seq"] = e.seq;
  j["block"] = e.block;
  j["indexInBlock"] = e.indexInBlock;
  j["txHash"] = e.txHash.hex();
  j["contract"] = e.contract.hex();
  return j;
}

Result<StampedEvent> stamped_from_json(const nlohmann::json& j) {
  StampedEvent s;
  auto body = event_from_json(j);
  if (!body) return body.error();
  s.body = *body;
  auto seq = field<std::uint64_t>(j, "seq");
  if (!seq) return seq.error();
  s.seq = *seq;
  auto block = field<BlockNumber>(j, "block");
  if (!block) return block.error();
  s.block = *block;
  auto idx = field<std::uint32_t>(j, "indexInBlock");
  if (!idx) return idx.error();
  s.indexInBlock = *idx;
  auto th = field<std::string>(j, "txHash");
  if (!th) return th.error();
  auto h = Hash32::from_hex(*th);
  if (!h) return Error(Err::BadRequest, "malformed txHash");
  s.txHash = *h;
  auto ca = addr_from(j.value("contract", json()));
  if (!ca) return ca.error();
  s.contract = *ca;
  return s;
}

}  // namespace w2e
