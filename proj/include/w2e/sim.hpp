#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/events.hpp"
#include "w2e/token.hpp"

namespace w2e {

/// Flat gasUsed constants for the semantic token operations. Totals, not
/// increments: a confirmed `transfer` reports exactly `transfer` gas. All
/// values can be overridden per network profile.
struct OperationCosts {
  Gas deployErc20 = 1'200'000;
  Gas deployErc721 = 1'150'000;
  Gas transfer = 51'000;
  Gas approve = 46'000;
  Gas transferFrom = 60'000;
  Gas mintDmd = 68'000;
  Gas buyDmd = 90'000;
  Gas mintPet = 97'000;
  Gas approveNft = 48'500;
  Gas transferNft = 85'000;
  Gas listNft = 90'000;
  Gas buyNft = 115'000;
  Gas cancelListing = 60'000;
  Gas grantReward = 105'000;

  std::optional<Gas> cost_of(std::string_view op) const;
  void apply_overrides(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ChainConfig {
  TimeMs blockIntervalMs = 12'000;
  double gasPriceGwei = 1.0;
  std::uint32_t inclusionBlocksMin = 1;
  std::uint32_t inclusionBlocksMax = 2;
  TimeMs overheadMsMin = 0;
  TimeMs overheadMsMax = 0;
  std::uint64_t rngSeed = 0;
  OperationCosts costs;

  Status validate() const;
  static Result<ChainConfig> from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// A submitted transaction. `to` absent means contract deployment. The payload
/// carries the simulator's canonical call/deploy envelope (JSON bytes); gas
/// metering for opaque deployments counts the decoded artifact bytes, not the
/// envelope.
struct Transaction {
  Address from;
  std::optional<Address> to;
  std::vector<std::uint8_t> payload;
  Wei valueWei = 0;
  Gas gasLimit = 0;
  std::uint64_t nonce = 0;

  Hash32 hash() const;
  nlohmann::json to_json() const;
  static Result<Transaction> from_json(const nlohmann::json& j);
};

struct Receipt {
  Hash32 txHash;
  BlockNumber blockNumber = 0;
  bool success = true;
  std::string revertReason;  // error name, empty on success
  Gas gasUsed = 0;
  double feeGwei = 0.0;
  TimeMs submittedAtMs = 0;
  TimeMs confirmedAtMs = 0;
  bool confirmed = false;
  std::optional<Address> contractAddress;  // deployments only

  nlohmann::json to_json() const;
  static Result<Receipt> from_json(const nlohmann::json& j);
};

// ---- payload envelope codec ----
std::vector<std::uint8_t> encode_call(std::string_view op, const nlohmann::json& args);
std::vector<std::uint8_t> encode_deploy(std::string_view standard, std::string_view bytecodeHex,
                                        const nlohmann::json& ctorArgs);

/// 21000 + 4 per zero byte + 16 per nonzero byte, plus 32000 + 200 per stored
/// code byte for deployments.
Gas intrinsic_gas(std::span<const std::uint8_t> payload, bool isDeployment,
                  std::size_t deployedCodeSize);

/// Exact product; the quantity the fee tables report.
double fee_gwei(Gas gasUsed, double gasPriceGwei);

/// confirmedAtMs - submittedAtMs for a confirmed receipt.
Result<TimeMs> confirmation_latency(const Receipt& receipt);

/// Deterministic in-process chain: a simulated clock, one block per interval,
/// a transaction pool with seeded inclusion/overhead draws, flat-cost gas
/// metering, and deployed token-economy contracts.
///
/// Single-writer: submissions and clock advancement are serialized by the
/// caller. Distinct instances are fully independent.
class LedgerSim {
 public:
  explicit LedgerSim(const ChainConfig& config);

  const ChainConfig& config() const { return config_; }

  // accounts
  void faucet(const Address& account, Wei amount);
  Wei native_balance(const Address& account) const;
  std::uint64_t nonce_of(const Address& account) const;

  // chain
  Result<Hash32> submit_tx(const Transaction& tx);
  Result<std::uint64_t> advance_to(TimeMs timeMs);  // returns blocks produced
  /// Advances to the next `n` block boundaries.
  std::uint64_t advance_blocks(std::uint64_t n);
  TimeMs now_ms() const { return now_; }
  BlockNumber height() const { return height_; }
  TimeMs next_block_time() const;
  std::size_t pending_count() const { return pool_.size(); }

  std::optional<Receipt> receipt_of(const Hash32& txHash) const;
  /// The confirmed event journal, ordered by stream sequence.
  const std::vector<StampedEvent>& events() const { return journal_; }

  // contracts
  bool has_contract(const Address& address) const;
  /// Economy behind a deployed ERC-20/ERC-721 contract, for equivalence checks.
  const TokenEconomy* economy_of(const Address& contract) const;
  Result<nlohmann::json> call_view(const Address& contract, std::string_view op,
                                   const nlohmann::json& args) const;

  /// Gas the simulator will meter for this transaction. Total, not estimate:
  /// the receipt's gasUsed equals this value whether the call succeeds or
  /// reverts.
  Gas required_gas(const Transaction& tx) const;

  std::uint64_t state_digest() const;

 private:
  struct AccountState {
    Wei balance = 0;
    std::uint64_t nonce = 0;
  };
  enum class Facet { Erc20, Erc721, Opaque };
  struct DeployedContract {
    Facet facet;
    std::size_t economyIndex = 0;  // unused for Opaque
    std::string standard;
  };
  struct PendingTx {
    Transaction tx;
    Hash32 hash;
    BlockNumber scheduledBlock;
    TimeMs submittedAtMs;
    TimeMs overheadMs;
  };
  struct ApplyOutcome {
    bool success = true;
    std::string reason;
    Gas gasUsed = 0;
    std::optional<Address> contractAddress;
  };

  ApplyOutcome apply_tx(const Transaction& tx, const Hash32& hash, BlockNumber block,
                        std::uint32_t* eventIndex);
  ApplyOutcome apply_deploy(const Transaction& tx);
  ApplyOutcome apply_call(const Transaction& tx, const DeployedContract& target,
                          const Address& contractAddr);
  void produce_block(BlockNumber number);
  Address new_contract_address(const Address& deployer, std::uint64_t nonce) const;
  void stamp_events(TokenEconomy& economy, const Address& contract, BlockNumber block,
                    const Hash32& txHash, std::uint32_t* eventIndex);

  ChainConfig config_;
  DetRng rng_;
  TimeMs now_ = 0;
  BlockNumber height_ = 0;
  std::uint64_t nextSeq_ = 0;
  std::map<Address, AccountState> accounts_;
  std::vector<PendingTx> pool_;
  std::unordered_map<Hash32, Receipt> receipts_;
  std::vector<StampedEvent> journal_;
  std::vector<std::unique_ptr<TokenEconomy>> economies_;
  std::map<Address, DeployedContract> contracts_;
};

}  // namespace w2e
