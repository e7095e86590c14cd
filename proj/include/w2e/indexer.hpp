#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/events.hpp"

namespace w2e {

struct IndexedListing {
  Address seller;
  Amount priceDmd = 0;
};

struct RewardEntry {
  Address user;
  RewardGrant grant;
  BlockNumber block = 0;
  std::uint64_t seq = 0;
};

struct Portfolio {
  Address user;
  Amount dmdBalance = 0;
  std::vector<TokenId> pets;            // owned token ids, ascending
  std::vector<TokenId> activeListings;  // user's listings still purchasable
  Amount totalEarnedDmd = 0;
  std::size_t workoutCount = 0;
};

/// Folds the confirmed event stream into queryable views: DMD balances, pet
/// ownership, listing state, and reward history. Consumes events strictly in
/// stream order; a skipped sequence number is reported as a gap and a replayed
/// one as a duplicate, so a restarted indexer can prove it lost nothing.
///
/// A listing counts as active while the seller still owns the pet and the
/// per-token approval points at the given market address — the same rule the
/// token economy applies.
class Indexer {
 public:
  explicit Indexer(const Address& marketAddress);

  /// Strict ingestion: the event's seq must be exactly the next expected.
  Status ingest(const StampedEvent& e);
  Status ingest_all(const std::vector<StampedEvent>& events);
  /// Restart helper: silently skips events already processed (seq below the
  /// next expected), still failing on gaps.
  Status catch_up(const std::vector<StampedEvent>& events);

  // views
  Amount dmd_balance(const Address& account) const;
  std::optional<Address> owner_of(TokenId tokenId) const;
  bool is_listing_active(TokenId tokenId) const;
  std::map<TokenId, IndexedListing> active_listings() const;
  const std::vector<RewardEntry>& reward_history() const { return rewards_; }
  Portfolio query_portfolio(const Address& user) const;

  std::uint64_t next_seq() const { return nextSeq_; }
  BlockNumber last_processed_block() const { return lastBlock_; }
  const Address& market_address() const { return market_; }
  std::uint64_t views_digest() const;

  // persistence
  Status save_snapshot(const std::string& path) const;
  static Result<Indexer> load_snapshot(const std::string& path);
  nlohmann::json to_json() const;
  static Result<Indexer> from_json(const nlohmann::json& j);

 private:
  Address market_;
  std::uint64_t nextSeq_ = 0;
  BlockNumber lastBlock_ = 0;
  std::map<Address, Amount> dmd_;
  std::map<TokenId, Address> owner_;
  std::map<TokenId, Address> nftApproval_;
  std::map<TokenId, IndexedListing> listings_;
  std::vector<RewardEntry> rewards_;
};

/// Appends stamped events to a JSONL journal, one object per line.
Status append_journal(const std::string& path, const std::vector<StampedEvent>& events);

/// Reads a JSONL journal back. A torn final line (crash during append) is
/// dropped; damage anywhere else is an error.
Result<std::vector<StampedEvent>> read_journal(const std::string& path);

}  // namespace w2e
