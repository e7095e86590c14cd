#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/reward.hpp"

namespace w2e {

// DMD movement; mints use the zero address as `from`.
struct TransferEvent {
  Address from, to;
  Amount amount = 0;
};

struct ApprovalEvent {
  Address owner, spender;
  Amount amount = 0;
};

// Pet ownership change; mints use the zero address as `from`.
struct NftTransferEvent {
  TokenId tokenId = 0;
  Address from, to;
};

// Per-token approval change; `approved` is the zero address when cleared.
// Ownership changes clear the approval implicitly without a separate event.
struct NftApprovalEvent {
  TokenId tokenId = 0;
  Address owner, approved;
};

struct ListedEvent {
  TokenId tokenId = 0;
  Address seller;
  Amount priceDmd = 0;
};

struct PurchasedEvent {
  TokenId tokenId = 0;
  Address seller, buyer;
  Amount priceDmd = 0;
};

struct CancelledEvent {
  TokenId tokenId = 0;
  Address seller;
};

struct RewardedEvent {
  RewardGrant grant;
};

using Event = std::variant<TransferEvent, ApprovalEvent, NftTransferEvent, NftApprovalEvent,
                           ListedEvent, PurchasedEvent, CancelledEvent, RewardedEvent>;

enum class EventKind {
  Transfer,
  Approval,
  NftTransfer,
  NftApproval,
  Listed,
  Purchased,
  Cancelled,
  Rewarded,
};

EventKind kind_of(const Event& e);
std::string_view kind_name(EventKind k);

/// An event as it appears in the confirmed journal: stamped with its inclusion
/// block, transaction hash, emitting contract, and a global stream sequence.
struct StampedEvent {
  std::uint64_t seq = 0;  // position in the confirmed stream, starting at 0
  BlockNumber block = 0;
  std::uint32_t indexInBlock = 0;
  Hash32 txHash;
  Address contract;
  Event body;
};

nlohmann::json event_to_json(const Event& e);
Result<Event> event_from_json(const nlohmann::json& j);

nlohmann::json stamped_to_json(const StampedEvent& e);
Result<StampedEvent> stamped_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const WorkoutRecord& r);
Result<WorkoutRecord> record_from_json(const nlohmann::json& j);

nlohmann::json grant_to_json(const RewardGrant& g);
Result<RewardGrant> grant_from_json(const nlohmann::json& j);

}  // namespace w2e
