#include "w2e/indexer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace w2e {

using nlohmann::json;

namespace {
constexpr int kSnapshotSchema = 1;
constexpr std::string_view kChecksumPrefix = "checksum ";

std::string fnv_hex(std::string_view text) {
  Digest d;
  d.feed(text);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d.value()));
  return buf;
}
}  // namespace

Indexer::Indexer(const Address& marketAddress) : market_(marketAddress) {}

Status Indexer::ingest(const StampedEvent& e) {
  if (e.seq < nextSeq_)
    return Error{Err::DuplicateBlock, "event seq " + std::to_string(e.seq) +
                                          " already processed, next is " +
                                          std::to_string(nextSeq_)};
  if (e.seq > nextSeq_)
    return Error{Err::GapDetected, "event seq jumps from " + std::to_string(nextSeq_) +
                                       " to " + std::to_string(e.seq)};

  Status st;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TransferEvent>) {
          if (!v.from.is_zero()) {
            auto it = dmd_.find(v.from);
            if (it == dmd_.end() || it->second < v.amount) {
              st = Error{Err::BadRequest, "stream debits more DMD than tracked for " +
                                              v.from.hex()};
              return;
            }
            it->second -= v.amount;
          }
          if (!v.to.is_zero()) dmd_[v.to] += v.amount;
        } else if constexpr (std::is_same_v<T, ApprovalEvent>) {
          // allowance state is not materialized
        } else if constexpr (std::is_same_v<T, NftTransferEvent>) {
          owner_[v.tokenId] = v.to;
          nftApproval_.erase(v.tokenId);
        } else if constexpr (std::is_same_v<T, NftApprovalEvent>) {
          if (v.approved.is_zero())
            nftApproval_.erase(v.tokenId);
          else
            nftApproval_[v.tokenId] = v.approved;
        } else if constexpr (std::is_same_v<T, ListedEvent>) {
          listings_[v.tokenId] = IndexedListing{v.seller, v.priceDmd};
        } else if constexpr (std::is_same_v<T, PurchasedEvent>) {
          listings_.erase(v.tokenId);
        } else if constexpr (std::is_same_v<T, CancelledEvent>) {
          listings_.erase(v.tokenId);
        } else if constexpr (std::is_same_v<T, RewardedEvent>) {
          rewards_.push_back(RewardEntry{v.grant.user, v.grant, e.block, e.seq});
        }
      },
      e.body);
  if (!st) return st;

  nextSeq_ = e.seq + 1;
  lastBlock_ = std::max(lastBlock_, e.block);
  return {};
}

Status Indexer::ingest_all(const std::vector<StampedEvent>& events) {
  for (const auto& e : events)
    if (auto st = ingest(e); !st) return st;
  return {};
}

Status Indexer::catch_up(const std::vector<StampedEvent>& events) {
  for (const auto& e : events) {
    if (e.seq < nextSeq_) continue;
    if (auto st = ingest(e); !st) return st;
  }
  return {};
}

Amount Indexer::dmd_balance(const Address& account) const {
  auto it = dmd_.find(account);
  return it == dmd_.end() ? 0 : it->second;
}

std::optional<Address> Indexer::owner_of(TokenId tokenId) const {
  auto it = owner_.find(tokenId);
  if (it == owner_.end() || it->second.is_zero()) return std::nullopt;
  return it->second;
}

bool Indexer::is_listing_active(TokenId tokenId) const {
  auto it = listings_.find(tokenId);
  if (it == listings_.end()) return false;
  auto owner = owner_.find(tokenId);
  if (owner == owner_.end() || owner->second != it->second.seller) return false;
  auto appr = nftApproval_.find(tokenId);
  return appr != nftApproval_.end() && appr->second == market_;
}

std::map<TokenId, IndexedListing> Indexer::active_listings() const {
  std::map<TokenId, IndexedListing> out;
  for (const auto& [id, listing] : listings_)
    if (is_listing_active(id)) out.emplace(id, listing);
  return out;
}

Portfolio Indexer::query_portfolio(const Address& user) const {
  Portfolio p;
  p.user = user;
  p.dmdBalance = dmd_balance(user);
  for (const auto& [id, owner] : owner_)
    if (owner == user) p.pets.push_back(id);
  for (const auto& [id, listing] : listings_)
    if (listing.seller == user && is_listing_active(id)) p.activeListings.push_back(id);
  for (const auto& r : rewards_)
    if (r.user == user) {
      p.totalEarnedDmd += r.grant.totalDmd;
      p.workoutCount += 1;
    }
  return p;
}

std::uint64_t Indexer::views_digest() const {
  Digest d;
  d.feed(market_);
  d.feed_u64(nextSeq_);
  d.feed_u64(lastBlock_);
  d.feed_u64(dmd_.size());
  for (const auto& [a, amt] : dmd_) {
    d.feed(a);
    d.feed_u64(amt);
  }
  d.feed_u64(owner_.size());
  for (const auto& [id, a] : owner_) {
    d.feed_u64(id);
    d.feed(a);
  }
  d.feed_u64(nftApproval_.size());
  for (const auto& [id, a] : nftApproval_) {
    d.feed_u64(id);
    d.feed(a);
  }
  d.feed_u64(listings_.size());
  for (const auto& [id, l] : listings_) {
    d.feed_u64(id);
    d.feed(l.seller);
    d.feed_u64(l.priceDmd);
  }
  d.feed_u64(rewards_.size());
  for (const auto& r : rewards_) {
    d.feed(r.user);
    d.feed_u64(r.grant.totalDmd);
    d.feed_u64(r.seq);
  }
  return d.value();
}

json Indexer::to_json() const {
  json dmd = json::array();
  for (const auto& [a, amt] : dmd_) dmd.push_back(json::array({a.hex(), amt}));
  json owners = json::array();
  for (const auto& [id, a] : owner_) owners.push_back(json::array({id, a.hex()}));
  json approvals = json::array();
  for (const auto& [id, a] : nftApproval_) approvals.push_back(json::array({id, a.hex()}));
  json listings = json::array();
  for (const auto& [id, l] : listings_)
    listings.push_back(json::array({id, json{{"seller", l.seller.hex()},
                                             {"priceDmd", l.priceDmd}}}));
  json rewards = json::array();
  for (const auto& r : rewards_)
    rewards.push_back(json{{"user", r.user.hex()},
                           {"grant", grant_to_json(r.grant)},
                           {"block", r.block},
                           {"seq", r.seq}});
  return json{{"schema", kSnapshotSchema},
              {"marketAddress", market_.hex()},
              {"nextSeq", nextSeq_},
              {"lastBlock", lastBlock_},
              {"dmd", std::move(dmd)},
              {"owners", std::move(owners)},
              {"approvals", std::move(approvals)},
              {"listings", std::move(listings)},
              {"rewards", std::move(rewards)}};
}

Result<Indexer> Indexer::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::CorruptSnapshot, "snapshot must be an object"};
  if (j.value("schema", -1) != kSnapshotSchema)
    return Error{Err::SchemaMismatch,
                 "snapshot schema " + j.value("schema", json()).dump() + ", expected " +
                     std::to_string(kSnapshotSchema)};
  auto market = Address::from_hex(j.value("marketAddress", ""));
  if (!market) return Error{Err::CorruptSnapshot, "snapshot market address invalid"};
  Indexer idx(*market);
  try {
    idx.nextSeq_ = j.at("nextSeq").get<std::uint64_t>();
    idx.lastBlock_ = j.at("lastBlock").get<BlockNumber>();
    for (const json& row : j.at("dmd")) {
      auto a = Address::from_hex(row.at(0).get<std::string>());
      if (!a) return Error{Err::CorruptSnapshot, "snapshot balance address invalid"};
      idx.dmd_[*a] = row.at(1).get<Amount>();
    }
    for (const json& row : j.at("owners")) {
      auto a = Address::from_hex(row.at(1).get<std::string>());
      if (!a) return Error{Err::CorruptSnapshot, "snapshot owner address invalid"};
      idx.owner_[row.at(0).get<TokenId>()] = *a;
    }
    for (const json& row : j.at("approvals")) {
      auto a = Address::from_hex(row.at(1).get<std::string>());
      if (!a) return Error{Err::CorruptSnapshot, "snapshot approval address invalid"};
      idx.nftApproval_[row.at(0).get<TokenId>()] = *a;
    }
    for (const json& row : j.at("listings")) {
      auto seller = Address::from_hex(row.at(1).at("seller").get<std::string>());
      if (!seller) return Error{Err::CorruptSnapshot, "snapshot seller address invalid"};
      idx.listings_[row.at(0).get<TokenId>()] =
          IndexedListing{*seller, row.at(1).at("priceDmd").get<Amount>()};
    }
    for (const json& row : j.at("rewards")) {
      auto user = Address::from_hex(row.at("user").get<std::string>());
      if (!user) return Error{Err::CorruptSnapshot, "snapshot reward user invalid"};
      auto grant = grant_from_json(row.at("grant"));
      if (!grant) return Error{Err::CorruptSnapshot, "snapshot reward grant invalid"};
      idx.rewards_.push_back(RewardEntry{*user, *grant, row.at("block").get<BlockNumber>(),
                                         row.at("seq").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    return Error{Err::CorruptSnapshot, std::string("snapshot field error: ") + e.what()};
  }
  return idx;
}

Status Indexer::save_snapshot(const std::string& path) const {
  const std::string payload = to_json().dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return Error{Err::IoError, "cannot write " + path};
  out << payload << '\n' << kChecksumPrefix << fnv_hex(payload) << '\n';
  out.flush();
  if (!out) return Error{Err::IoError, "write failed for " + path};
  return {};
}

Result<Indexer> Indexer::load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Err::IoError, "cannot open " + path};
  std::string payload, checksumLine, line;
  bool havePayload = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (havePayload) {
      if (!checksumLine.empty())
        return Error{Err::CorruptSnapshot, "trailing data after checksum in " + path};
      checksumLine = line;
    } else {
      payload = line;
      havePayload = true;
    }
  }
  if (!havePayload || checksumLine.empty())
    return Error{Err::CorruptSnapshot, "snapshot is truncated: " + path};
  if (!checksumLine.starts_with(kChecksumPrefix))
    return Error{Err::CorruptSnapshot, "snapshot checksum line malformed: " + path};
  if (checksumLine.substr(kChecksumPrefix.size()) != fnv_hex(payload))
    return Error{Err::CorruptSnapshot, "snapshot checksum mismatch: " + path};
  json j = json::parse(payload, nullptr, false);
  if (j.is_discarded())
    return Error{Err::CorruptSnapshot, "snapshot payload is not valid JSON: " + path};
  return from_json(j);
}

Status append_journal(const std::string& path, const std::vector<StampedEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) return Error{Err::IoError, "cannot append to " + path};
  for (const auto& e : events) out << stamped_to_json(e).dump() << '\n';
  out.flush();
  if (!out) return Error{Err::IoError, "append failed for " + path};
  return {};
}

Result<std::vector<StampedEvent>> read_journal(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Err::IoError, "cannot open " + path};
  std::vector<StampedEvent> out;
  std::string line;
  std::size_t lineNo = 0;
  bool pendingBad = false;
  std::size_t badLine = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    if (pendingBad)
      return Error{Err::IoError,
                   path + ": damaged journal line " + std::to_string(badLine)};
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      pendingBad = true;  // tolerated only if this turns out to be the last line
      badLine = lineNo;
      continue;
    }
    auto e = stamped_from_json(j);
    if (!e) {
      pendingBad = true;
      badLine = lineNo;
      continue;
    }
    out.push_back(std::move(*e));
  }
  return out;
}

}  // namespace w2e
