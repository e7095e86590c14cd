#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/sim.hpp"

namespace w2e {

/// One benchmark network. `kind` selects the backend: "sim" runs the
/// deterministic in-process ledger, "rpc" talks JSON-RPC to `rpcUrl`. A
/// W2E_RPC_URL_<SLUG> environment variable rewires a sim profile to a live
/// endpoint without touching the profile file.
struct NetworkProfile {
  std::string name;
  std::string kind = "sim";
  std::uint64_t chainId = 0;
  TimeMs pollIntervalMs = 250;
  TimeMs timeoutMs = 120'000;
  std::string rpcUrl;
  ChainConfig sim;

  std::string slug() const;
  Status validate() const;
  nlohmann::json to_json() const;
  static Result<NetworkProfile> from_json(const nlohmann::json& j);
};

class ProfileRegistry {
 public:
  static Result<ProfileRegistry> load_file(const std::string& path);
  static Result<ProfileRegistry> from_json(const nlohmann::json& j);

  const std::vector<NetworkProfile>& profiles() const { return profiles_; }
  const NetworkProfile* by_name(std::string_view name) const;
  /// sha256 of the profile file bytes, reproduced in report metadata.
  const std::string& source_hash() const { return sourceHash_; }

 private:
  std::vector<NetworkProfile> profiles_;
  std::string sourceHash_;
};

struct ContractArtifact {
  std::string name;
  std::string standard;
  std::string bytecodeHex;
  nlohmann::json abi;
  std::vector<std::string> constructorParams;

  Status validate() const;
  std::size_t bytecode_size() const { return bytecodeHex.size() / 2; }
  static Result<ContractArtifact> load_file(const std::string& path);
  static Result<ContractArtifact> from_json(const nlohmann::json& j);
};

/// Turns a transaction into the raw blob the wire accepts. The ledger
/// simulator has no signature scheme; the blob is the canonical transaction
/// JSON in hex, and authenticity is modeled by the account field.
class Signer {
 public:
  virtual ~Signer() = default;
  virtual const Address& account() const = 0;
  virtual Result<std::string> sign(const Transaction& tx) const = 0;
};

class JsonBlobSigner final : public Signer {
 public:
  explicit JsonBlobSigner(const Address& account) : account_(account) {}
  const Address& account() const override { return account_; }
  Result<std::string> sign(const Transaction& tx) const override;

 private:
  Address account_;
};

/// Decodes a JsonBlobSigner blob back into a transaction (wire servers and
/// tests).
Result<Transaction> decode_raw_tx(std::string_view rawHex);

class ChainBackend {
 public:
  virtual ~ChainBackend() = default;
  virtual Result<std::uint64_t> chain_id() = 0;
  virtual Result<double> gas_price_gwei() = 0;
  virtual Result<Wei> native_balance(const Address& account) = 0;
  virtual Result<std::uint64_t> nonce_of(const Address& account) = 0;
  virtual Result<Gas> estimate_gas(const Transaction& tx) = 0;
  virtual Result<Hash32> send_raw(const std::string& rawHex) = 0;
  /// Empty optional while the transaction is pending.
  virtual Result<std::optional<Receipt>> receipt_of(const Hash32& txHash) = 0;
  virtual Result<nlohmann::json> call_view(const Address& contract, std::string_view op,
                                           const nlohmann::json& args) = 0;
  /// Blocks (or advances the simulated clock) for `ms`.
  virtual void poll_wait(TimeMs ms) = 0;
  /// Moves the clock to the next block boundary; no-op on live chains.
  /// Benchmarks call this so submission-to-boundary phase is fixed.
  virtual Status align_to_next_block() { return {}; }
};

class SimBackend final : public ChainBackend {
 public:
  explicit SimBackend(const ChainConfig& config);

  Result<std::uint64_t> chain_id() override { return chainId_; }
  Result<double> gas_price_gwei() override { return sim_.config().gasPriceGwei; }
  Result<Wei> native_balance(const Address& account) override;
  Result<std::uint64_t> nonce_of(const Address& account) override;
  Result<Gas> estimate_gas(const Transaction& tx) override;
  Result<Hash32> send_raw(const std::string& rawHex) override;
  Result<std::optional<Receipt>> receipt_of(const Hash32& txHash) override;
  Result<nlohmann::json> call_view(const Address& contract, std::string_view op,
                                   const nlohmann::json& args) override;
  void poll_wait(TimeMs ms) override;
  Status align_to_next_block() override;

  void set_chain_id(std::uint64_t id) { chainId_ = id; }
  LedgerSim& sim() { return sim_; }
  const LedgerSim& sim() const { return sim_; }

 private:
  LedgerSim sim_;
  std::uint64_t chainId_ = 0;
};

/// JSON-RPC 2.0 client backend (eth_chainId, eth_gasPrice, eth_getBalance,
/// eth_getTransactionCount, eth_estimateGas, eth_sendRawTransaction,
/// eth_getTransactionReceipt, eth_call).
class RpcBackend final : public ChainBackend {
 public:
  explicit RpcBackend(std::string url, TimeMs requestTimeoutMs = 10'000);
  ~RpcBackend() override;

  Result<std::uint64_t> chain_id() override;
  Result<double> gas_price_gwei() override;
  Result<Wei> native_balance(const Address& account) override;
  Result<std::uint64_t> nonce_of(const Address& account) override;
  Result<Gas> estimate_gas(const Transaction& tx) override;
  Result<Hash32> send_raw(const std::string& rawHex) override;
  Result<std::optional<Receipt>> receipt_of(const Hash32& txHash) override;
  Result<nlohmann::json> call_view(const Address& contract, std::string_view op,
                                   const nlohmann::json& args) override;
  void poll_wait(TimeMs ms) override;

 private:
  Result<nlohmann::json> rpc(std::string_view method, nlohmann::json params);

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Result<std::shared_ptr<ChainBackend>> make_backend(const NetworkProfile& profile);

struct DeployResult {
  Address address;
  Receipt receipt;
};

/// High-level chain access for one signer on one network: deployment,
/// state-changing calls with receipt polling, and views. Submissions are
/// sequential; the next nonce is read from the backend before each send.
/// Several gateways (one per signer) may share a backend.
class Gateway {
 public:
  Gateway(NetworkProfile profile, std::shared_ptr<ChainBackend> backend,
          std::unique_ptr<Signer> signer);

  /// Confirms the endpoint answers and its chain id matches the profile.
  Status verify_connection();

  Result<DeployResult> deploy(const ContractArtifact& artifact,
                              const nlohmann::json& ctorArgs);
  Result<Receipt> call(const Address& contract, std::string_view op,
                       const nlohmann::json& args, Wei valueWei = 0);
  Result<nlohmann::json> view(const Address& contract, std::string_view op,
                              const nlohmann::json& args) const;
  Result<Wei> native_balance(const Address& account) const;

  /// DMD balance through the bound token contract.
  void bind_dmd(const Address& contract) { dmdContract_ = contract; }
  Result<Amount> dmd_balance(const Address& account) const;

  Result<Receipt> poll_receipt(const Hash32& txHash);
  Status align_to_next_block() { return backend_->align_to_next_block(); }

  const NetworkProfile& profile() const { return profile_; }
  const Address& account() const { return signer_->account(); }
  ChainBackend& backend() { return *backend_; }

 private:
  Result<Receipt> submit_and_wait(Transaction tx);

  NetworkProfile profile_;
  std::shared_ptr<ChainBackend> backend_;
  std::unique_ptr<Signer> signer_;
  std::optional<Address> dmdContract_;
};

}  // namespace w2e
