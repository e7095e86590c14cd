#include "w2e/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "w2e/crypto.hpp"

namespace w2e {

using nlohmann::json;

namespace {

constexpr double kGweiPerWei = 1e9;

Wei max_fee_wei(Gas gasLimit, double gasPriceGwei) {
  double wei = std::ceil(static_cast<double>(gasLimit) * gasPriceGwei * kGweiPerWei);
  if (wei < 0) return 0;
  return static_cast<Wei>(wei);
}

Wei fee_wei(double feeGwei) {
  return static_cast<Wei>(std::llround(feeGwei * kGweiPerWei));
}

Result<Address> addr_arg(const json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_string())
    return Error{Err::BadRequest, std::string("missing address arg: ") + key};
  auto a = Address::from_hex(args[key].get<std::string>());
  if (!a) return Error{Err::BadRequest, std::string("bad address arg: ") + key};
  return *a;
}

// Accepts any non-negative JSON integer: callers that hand over in-memory
// objects carry signed literals where parsed wire text carries unsigned.
Result<std::uint64_t> uint_arg(const json& args, const char* key) {
  if (args.contains(key)) {
    const json& v = args[key];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  return Error{Err::BadRequest, std::string("missing uint arg: ") + key};
}

json parse_payload(const std::vector<std::uint8_t>& payload) {
  if (payload.empty()) return json();
  return json::parse(payload.begin(), payload.end(), nullptr, false);
}

}  // namespace

// ---- OperationCosts ----

std::optional<Gas> OperationCosts::cost_of(std::string_view op) const {
  if (op == "transfer") return transfer;
  if (op == "approve") return approve;
  if (op == "transferFrom") return transferFrom;
  if (op == "mintDmd") return mintDmd;
  if (op == "buyDmd") return buyDmd;
  if (op == "mintPet") return mintPet;
  if (op == "approveNft" || op == "approveMarket") return approveNft;
  if (op == "transferNft") return transferNft;
  if (op == "listNft") return listNft;
  if (op == "buyNft") return buyNft;
  if (op == "cancelListing") return cancelListing;
  if (op == "grantReward") return grantReward;
  if (op == "deployErc20") return deployErc20;
  if (op == "deployErc721") return deployErc721;
  return std::nullopt;
}

void OperationCosts::apply_overrides(const json& j) {
  auto set = [&](const char* key, Gas& slot) {
    if (j.contains(key) && j[key].is_number_unsigned()) slot = j[key].get<Gas>();
  };
  set("deployErc20", deployErc20);
  set("deployErc721", deployErc721);
  set("transfer", transfer);
  set("approve", approve);
  set("transferFrom", transferFrom);
  set("mintDmd", mintDmd);
  set("buyDmd", buyDmd);
  set("mintPet", mintPet);
  set("approveNft", approveNft);
  set("transferNft", transferNft);
  set("listNft", listNft);
  set("buyNft", buyNft);
  set("cancelListing", cancelListing);
  set("grantReward", grantReward);
}

json OperationCosts::to_json() const {
  return json{{"deployErc20", deployErc20},
              {"deployErc721", deployErc721},
              {"transfer", transfer},
              {"approve", approve},
              {"transferFrom", transferFrom},
              {"mintDmd", mintDmd},
              {"buyDmd", buyDmd},
              {"mintPet", mintPet},
              {"approveNft", approveNft},
              {"transferNft", transferNft},
              {"listNft", listNft},
              {"buyNft", buyNft},
              {"cancelListing", cancelListing},
              {"grantReward", grantReward}};
}

// ---- ChainConfig ----

Status ChainConfig::validate() const {
  if (blockIntervalMs <= 0)
    return Error{Err::BadProfile, "blockIntervalMs must be positive"};
  if (gasPriceGwei < 0) return Error{Err::BadProfile, "gasPriceGwei must be non-negative"};
  if (inclusionBlocksMin < 1)
    return Error{Err::BadProfile, "inclusionBlocksMin must be at least 1"};
  if (inclusionBlocksMax < inclusionBlocksMin)
    return Error{Err::BadProfile, "inclusionBlocksMax below inclusionBlocksMin"};
  if (overheadMsMin < 0) return Error{Err::BadProfile, "overheadMsMin must be non-negative"};
  if (overheadMsMax < overheadMsMin)
    return Error{Err::BadProfile, "overheadMsMax below overheadMsMin"};
  return {};
}

Result<ChainConfig> ChainConfig::from_json(const json& j) {
  ChainConfig c;
  if (!j.is_object()) return Error{Err::BadProfile, "sim config must be an object"};
  auto geti = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  geti("blockIntervalMs", c.blockIntervalMs);
  geti("inclusionBlocksMin", c.inclusionBlocksMin);
  geti("inclusionBlocksMax", c.inclusionBlocksMax);
  geti("overheadMsMin", c.overheadMsMin);
  geti("overheadMsMax", c.overheadMsMax);
  geti("rngSeed", c.rngSeed);
  if (j.contains("gasPriceGwei")) c.gasPriceGwei = j["gasPriceGwei"].get<double>();
  if (j.contains("costs")) c.costs.apply_overrides(j["costs"]);
  if (auto st = c.validate(); !st) return st.error();
  return c;
}

json ChainConfig::to_json() const {
  return json{{"blockIntervalMs", blockIntervalMs},
              {"gasPriceGwei", gasPriceGwei},
              {"inclusionBlocksMin", inclusionBlocksMin},
              {"inclusionBlocksMax", inclusionBlocksMax},
              {"overheadMsMin", overheadMsMin},
              {"overheadMsMax", overheadMsMax},
              {"rngSeed", rngSeed},
              {"costs", costs.to_json()}};
}

// ---- Transaction / Receipt ----

json Transaction::to_json() const {
  json j{{"from", from.hex()},
         {"valueWei", valueWei},
         {"gasLimit", gasLimit},
         {"nonce", nonce},
         {"payloadHex", to_hex(payload)}};
  if (to) j["to"] = to->hex();
  return j;
}

Result<Transaction> Transaction::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadRequest, "transaction must be an object"};
  Transaction tx;
  auto from = Address::from_hex(j.value("from", ""));
  if (!from) return Error{Err::BadRequest, "transaction from address invalid"};
  tx.from = *from;
  if (j.contains("to") && !j["to"].is_null()) {
    auto to = Address::from_hex(j["to"].get<std::string>());
    if (!to) return Error{Err::BadRequest, "transaction to address invalid"};
    tx.to = *to;
  }
  auto payload = from_hex(j.value("payloadHex", ""));
  if (!payload) return Error{Err::BadRequest, "transaction payload hex invalid"};
  tx.payload = std::move(*payload);
  tx.valueWei = j.value("valueWei", Wei{0});
  tx.gasLimit = j.value("gasLimit", Gas{0});
  tx.nonce = j.value("nonce", std::uint64_t{0});
  return tx;
}

Hash32 Transaction::hash() const {
  const std::string canon = to_json().dump();
  const auto digest = sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size()));
  Hash32 h;
  std::copy(digest.begin(), digest.end(), h.bytes.begin());
  return h;
}

json Receipt::to_json() const {
  json j{{"txHash", txHash.hex()},
         {"blockNumber", blockNumber},
         {"success", success},
         {"gasUsed", gasUsed},
         {"feeGwei", feeGwei},
         {"submittedAtMs", submittedAtMs},
         {"confirmedAtMs", confirmedAtMs},
         {"confirmed", confirmed}};
  if (!revertReason.empty()) j["revertReason"] = revertReason;
  if (contractAddress) j["contractAddress"] = contractAddress->hex();
  return j;
}

Result<Receipt> Receipt::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadRequest, "receipt must be an object"};
  Receipt r;
  auto h = Hash32::from_hex(j.value("txHash", ""));
  if (!h) return Error{Err::BadRequest, "receipt txHash invalid"};
  r.txHash = *h;
  r.blockNumber = j.value("blockNumber", BlockNumber{0});
  r.success = j.value("success", true);
  r.revertReason = j.value("revertReason", "");
  r.gasUsed = j.value("gasUsed", Gas{0});
  r.feeGwei = j.value("feeGwei", 0.0);
  r.submittedAtMs = j.value("submittedAtMs", TimeMs{0});
  r.confirmedAtMs = j.value("confirmedAtMs", TimeMs{0});
  r.confirmed = j.value("confirmed", false);
  if (j.contains("contractAddress") && !j["contractAddress"].is_null()) {
    auto a = Address::from_hex(j["contractAddress"].get<std::string>());
    if (!a) return Error{Err::BadRequest, "receipt contractAddress invalid"};
    r.contractAddress = *a;
  }
  return r;
}

// ---- payload codec ----

std::vector<std::uint8_t> encode_call(std::string_view op, const json& args) {
  const std::string body =
      json{{"call", json{{"op", std::string(op)}, {"args", args}}}}.dump();
  return std::vector<std::uint8_t>(body.begin(), body.end());
}

std::vector<std::uint8_t> encode_deploy(std::string_view standard, std::string_view bytecodeHex,
                                        const json& ctorArgs) {
  const std::string body = json{{"deploy", json{{"standard", std::string(standard)},
                                                {"codeHex", std::string(bytecodeHex)},
                                                {"args", ctorArgs}}}}
                               .dump();
  return std::vector<std::uint8_t>(body.begin(), body.end());
}

// ---- free functions ----

Gas intrinsic_gas(std::span<const std::uint8_t> payload, bool isDeployment,
                  std::size_t deployedCodeSize) {
  Gas gas = 21'000;
  for (std::uint8_t b : payload) gas += (b == 0) ? 4 : 16;
  if (isDeployment) gas += 32'000 + 200 * static_cast<Gas>(deployedCodeSize);
  return gas;
}

double fee_gwei(Gas gasUsed, double gasPriceGwei) {
  return static_cast<double>(gasUsed) * gasPriceGwei;
}

Result<TimeMs> confirmation_latency(const Receipt& receipt) {
  if (!receipt.confirmed)
    return Error{Err::NotConfirmed, "receipt has no confirmation yet"};
  return receipt.confirmedAtMs - receipt.submittedAtMs;
}

// ---- LedgerSim ----

LedgerSim::LedgerSim(const ChainConfig& config) : config_(config), rng_(config.rngSeed) {
  if (auto st = config_.validate(); !st)
    throw std::invalid_argument("LedgerSim: " + st.error().to_string());
}

void LedgerSim::faucet(const Address& account, Wei amount) {
  accounts_[account].balance += amount;
}

Wei LedgerSim::native_balance(const Address& account) const {
  auto it = accounts_.find(account);
  return it == accounts_.end() ? 0 : it->second.balance;
}

std::uint64_t LedgerSim::nonce_of(const Address& account) const {
  auto it = accounts_.find(account);
  return it == accounts_.end() ? 0 : it->second.nonce;
}

TimeMs LedgerSim::next_block_time() const {
  return static_cast<TimeMs>(height_ + 1) * config_.blockIntervalMs;
}

Address LedgerSim::new_contract_address(const Address& deployer, std::uint64_t nonce) const {
  return address_from_label("w2e/contract/" + deployer.hex() + "/" + std::to_string(nonce));
}

Gas LedgerSim::required_gas(const Transaction& tx) const {
  const json env = parse_payload(tx.payload);
  const Gas raw = intrinsic_gas(tx.payload, false, 0);
  if (!tx.to) {
    if (!env.is_object() || !env.contains("deploy")) return raw;
    const json& d = env["deploy"];
    const std::string standard = d.value("standard", "");
    if (standard == "ERC20") return config_.costs.deployErc20;
    if (standard == "ERC721") return config_.costs.deployErc721;
    auto code = from_hex(d.value("codeHex", ""));
    if (!code) return raw;
    return intrinsic_gas(*code, true, code->size());
  }
  auto it = contracts_.find(*tx.to);
  if (it == contracts_.end()) return raw;  // plain transfer
  if (!env.is_object() || !env.contains("call")) return raw;
  const std::string op = env["call"].value("op", "");
  if (auto c = config_.costs.cost_of(op)) return *c;
  return raw;
}

Result<Hash32> LedgerSim::submit_tx(const Transaction& tx) {
  AccountState& acct = accounts_[tx.from];
  if (tx.nonce < acct.nonce)
    return Error{Err::NonceTooLow, "nonce " + std::to_string(tx.nonce) + " already used, next is " +
                                       std::to_string(acct.nonce)};
  if (tx.nonce > acct.nonce)
    return Error{Err::NonceGap, "nonce " + std::to_string(tx.nonce) + " skips ahead of " +
                                    std::to_string(acct.nonce)};
  const Gas required = required_gas(tx);
  if (required > tx.gasLimit)
    return Error{Err::GasLimitExceeded, "needs " + std::to_string(required) + " gas, limit is " +
                                            std::to_string(tx.gasLimit)};
  const Wei maxFee = max_fee_wei(tx.gasLimit, config_.gasPriceGwei);
  if (acct.balance < tx.valueWei || acct.balance - tx.valueWei < maxFee)
    return Error{Err::InsufficientFunds, "balance cannot cover value plus max fee"};

  PendingTx pending;
  pending.tx = tx;
  pending.hash = tx.hash();
  const std::uint64_t k =
      rng_.uniform_u64(config_.inclusionBlocksMin, config_.inclusionBlocksMax);
  pending.scheduledBlock = height_ + k;
  pending.submittedAtMs = now_;
  pending.overheadMs = static_cast<TimeMs>(std::llround(rng_.uniform_real(
      static_cast<double>(config_.overheadMsMin), static_cast<double>(config_.overheadMsMax))));
  acct.nonce += 1;

  Receipt stub;
  stub.txHash = pending.hash;
  stub.submittedAtMs = now_;
  stub.confirmed = false;
  receipts_[pending.hash] = stub;
  pool_.push_back(std::move(pending));
  return pool_.back().hash;
}

Result<std::uint64_t> LedgerSim::advance_to(TimeMs timeMs) {
  if (timeMs < now_)
    return Error{Err::ClockRegression, "clock moved from " + std::to_string(now_) + " back to " +
                                           std::to_string(timeMs)};
  const auto lastBoundary =
      static_cast<BlockNumber>(timeMs / config_.blockIntervalMs);
  std::uint64_t produced = 0;
  while (height_ < lastBoundary) {
    produce_block(height_ + 1);
    ++produced;
  }
  now_ = timeMs;
  return produced;
}

std::uint64_t LedgerSim::advance_blocks(std::uint64_t n) {
  const TimeMs target = static_cast<TimeMs>(height_ + n) * config_.blockIntervalMs;
  auto r = advance_to(target);
  return r ? *r : 0;
}

void LedgerSim::produce_block(BlockNumber number) {
  const TimeMs blockTime = static_cast<TimeMs>(number) * config_.blockIntervalMs;
  height_ = number;
  now_ = std::max(now_, blockTime);

  std::vector<PendingTx> included;
  auto keep = pool_.begin();
  for (auto it = pool_.begin(); it != pool_.end(); ++it) {
    if (it->scheduledBlock <= number) {
      included.push_back(std::move(*it));
    } else {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    }
  }
  pool_.erase(keep, pool_.end());

  std::uint32_t eventIndex = 0;
  for (const PendingTx& p : included) {
    const ApplyOutcome out = apply_tx(p.tx, p.hash, number, &eventIndex);
    Receipt& r = receipts_[p.hash];
    r.blockNumber = number;
    r.success = out.success;
    r.revertReason = out.reason;
    r.gasUsed = out.gasUsed;
    r.feeGwei = fee_gwei(out.gasUsed, config_.gasPriceGwei);
    r.confirmedAtMs = blockTime + p.overheadMs;
    r.confirmed = true;
    r.contractAddress = out.contractAddress;
  }
}

LedgerSim::ApplyOutcome LedgerSim::apply_tx(const Transaction& tx, const Hash32& hash,
                                            BlockNumber block, std::uint32_t* eventIndex) {
  AccountState& acct = accounts_[tx.from];
  const Wei maxFee = max_fee_wei(tx.gasLimit, config_.gasPriceGwei);
  if (acct.balance < maxFee) {
    // Funds were checked at submission but drained by an earlier transaction
    // in the pool; charge what remains and apply nothing.
    ApplyOutcome out;
    out.success = false;
    out.reason = std::string(err_name(Err::InsufficientFunds));
    out.gasUsed = required_gas(tx);
    const Wei charge = std::min(acct.balance, fee_wei(fee_gwei(out.gasUsed, config_.gasPriceGwei)));
    acct.balance -= charge;
    return out;
  }
  // Gas is prepaid at the limit and the unused part refunded, so the
  // operation itself sees the post-prepay balance.
  acct.balance -= maxFee;
  ApplyOutcome out;
  if (!tx.to) {
    out = apply_deploy(tx);
  } else if (auto it = contracts_.find(*tx.to); it != contracts_.end()) {
    out = apply_call(tx, it->second, *tx.to);
    if (out.success) {
      TokenEconomy* eco = it->second.facet == Facet::Opaque
                              ? nullptr
                              : economies_[it->second.economyIndex].get();
      if (eco != nullptr) stamp_events(*eco, *tx.to, block, hash, eventIndex);
    }
  } else {
    // plain native transfer to an externally owned account
    out.gasUsed = intrinsic_gas(tx.payload, false, 0);
    if (accounts_[tx.from].balance < tx.valueWei) {
      out.success = false;
      out.reason = std::string(err_name(Err::InsufficientFunds));
    } else {
      accounts_[tx.from].balance -= tx.valueWei;
      accounts_[*tx.to].balance += tx.valueWei;
    }
  }
  const Wei actualFee = fee_wei(fee_gwei(out.gasUsed, config_.gasPriceGwei));
  accounts_[tx.from].balance += maxFee - std::min(maxFee, actualFee);
  return out;
}

LedgerSim::ApplyOutcome LedgerSim::apply_deploy(const Transaction& tx) {
  ApplyOutcome out;
  auto fail = [&](Err code, std::string detail) {
    out.success = false;
    out.reason = std::string(err_name(code));
    (void)detail;
    return out;
  };
  out.gasUsed = intrinsic_gas(tx.payload, false, 0);
  const json env = parse_payload(tx.payload);
  if (!env.is_object() || !env.contains("deploy") || !env["deploy"].is_object())
    return fail(Err::BadRequest, "not a deploy envelope");
  const json& d = env["deploy"];
  const std::string standard = d.value("standard", "");
  const json args = d.value("args", json::object());
  const Address addr = new_contract_address(tx.from, tx.nonce);

  if (standard == "ERC20") {
    out.gasUsed = config_.costs.deployErc20;
    if (tx.valueWei != 0) return fail(Err::BadRequest, "deployments do not accept value");
    Amount rate = 1000;
    if (args.contains("rateDmdPerNative")) {
      if (!args["rateDmdPerNative"].is_number_unsigned())
        return fail(Err::BadRequest, "rateDmdPerNative must be unsigned");
      rate = args["rateDmdPerNative"].get<Amount>();
    }
    economies_.push_back(std::make_unique<TokenEconomy>(tx.from, rate));
    contracts_[addr] = DeployedContract{Facet::Erc20, economies_.size() - 1, standard};
  } else if (standard == "ERC721") {
    out.gasUsed = config_.costs.deployErc721;
    if (tx.valueWei != 0) return fail(Err::BadRequest, "deployments do not accept value");
    std::size_t economyIndex;
    if (args.contains("dmd")) {
      auto dmd = Address::from_hex(args["dmd"].get<std::string>());
      if (!dmd) return fail(Err::BadRequest, "dmd link address invalid");
      auto linked = contracts_.find(*dmd);
      if (linked == contracts_.end()) return fail(Err::UnknownContract, "dmd link unknown");
      if (linked->second.facet != Facet::Erc20)
        return fail(Err::WrongStandard, "dmd link is not an ERC20 deployment");
      economyIndex = linked->second.economyIndex;
    } else {
      economies_.push_back(std::make_unique<TokenEconomy>(tx.from));
      economyIndex = economies_.size() - 1;
    }
    contracts_[addr] = DeployedContract{Facet::Erc721, economyIndex, standard};
  } else {
    // Opaque artifact: deploy-only, metered on the decoded bytecode.
    auto code = from_hex(d.value("codeHex", ""));
    if (!code) return fail(Err::BadArtifact, "bytecode hex invalid");
    out.gasUsed = intrinsic_gas(*code, true, code->size());
    if (tx.valueWei != 0) return fail(Err::BadRequest, "deployments do not accept value");
    contracts_[addr] = DeployedContract{Facet::Opaque, 0, standard};
  }
  out.contractAddress = addr;
  return out;
}

LedgerSim::ApplyOutcome LedgerSim::apply_call(const Transaction& tx,
                                              const DeployedContract& target,
                                              const Address& contractAddr) {
  (void)contractAddr;
  ApplyOutcome out;
  out.gasUsed = intrinsic_gas(tx.payload, false, 0);
  const json env = parse_payload(tx.payload);
  if (!env.is_object() || !env.contains("call") || !env["call"].is_object()) {
    out.success = false;
    out.reason = std::string(err_name(Err::BadRequest));
    return out;
  }
  const std::string op = env["call"].value("op", "");
  const json args = env["call"].value("args", json::object());
  if (auto c = config_.costs.cost_of(op)) out.gasUsed = *c;

  auto revert = [&](const Error& e) {
    out.success = false;
    out.reason = std::string(err_name(e.code));
    return out;
  };
  if (target.facet == Facet::Opaque)
    return revert(Error{Err::WrongStandard, "contract has no token interface"});
  TokenEconomy& eco = *economies_[target.economyIndex];

  static constexpr std::string_view kErc20Ops[] = {"transfer", "approve", "transferFrom",
                                                   "mintDmd", "buyDmd"};
  const bool isErc20Op =
      std::find(std::begin(kErc20Ops), std::end(kErc20Ops), op) != std::end(kErc20Ops);
  if (isErc20Op && target.facet != Facet::Erc20)
    return revert(Error{Err::WrongStandard, "ERC20 call on non-ERC20 contract"});
  if (!isErc20Op && target.facet != Facet::Erc721)
    return revert(Error{Err::WrongStandard, "ERC721 call on non-ERC721 contract"});
  if (tx.valueWei != 0 && op != "buyDmd")
    return revert(Error{Err::BadRequest, "operation does not accept value"});

  // Local adapter exposing the simulator's native accounts to the sale desk.
  struct Adapter final : NativeLedger {
    LedgerSim& sim;
    explicit Adapter(LedgerSim& s) : sim(s) {}
    Wei balance(const Address& a) const override {
      auto it = sim.accounts_.find(a);
      return it == sim.accounts_.end() ? 0 : it->second.balance;
    }
    bool move(const Address& f, const Address& t, Wei amount) override {
      auto it = sim.accounts_.find(f);
      if (it == sim.accounts_.end() || it->second.balance < amount) return false;
      it->second.balance -= amount;
      sim.accounts_[t].balance += amount;
      return true;
    }
  } native{*this};

  Status st;
  if (op == "transfer") {
    auto to = addr_arg(args, "to");
    auto amount = uint_arg(args, "amount");
    if (!to) return revert(to.error());
    if (!amount) return revert(amount.error());
    st = eco.transfer(tx.from, *to, *amount);
  } else if (op == "approve") {
    auto spender = addr_arg(args, "spender");
    auto amount = uint_arg(args, "amount");
    if (!spender) return revert(spender.error());
    if (!amount) return revert(amount.error());
    st = eco.approve(tx.from, *spender, *amount);
  } else if (op == "transferFrom") {
    auto owner = addr_arg(args, "owner");
    auto to = addr_arg(args, "to");
    auto amount = uint_arg(args, "amount");
    if (!owner) return revert(owner.error());
    if (!to) return revert(to.error());
    if (!amount) return revert(amount.error());
    st = eco.transfer_from(tx.from, *owner, *to, *amount);
  } else if (op == "mintDmd") {
    auto to = addr_arg(args, "to");
    auto amount = uint_arg(args, "amount");
    if (!to) return revert(to.error());
    if (!amount) return revert(amount.error());
    st = eco.mint_dmd(tx.from, *to, *amount);
  } else if (op == "buyDmd") {
    auto credited = eco.buy_dmd(native, tx.from, tx.valueWei);
    if (!credited) return revert(credited.error());
  } else if (op == "mintPet") {
    auto to = addr_arg(args, "to");
    auto rate = uint_arg(args, "bonusRatePct");
    if (!to) return revert(to.error());
    if (!rate) return revert(rate.error());
    auto id = eco.mint_pet(tx.from, *to, static_cast<std::uint32_t>(*rate));
    if (!id) return revert(id.error());
  } else if (op == "approveNft") {
    auto tokenId = uint_arg(args, "tokenId");
    auto spender = addr_arg(args, "spender");
    if (!tokenId) return revert(tokenId.error());
    if (!spender) return revert(spender.error());
    st = eco.approve_nft(tx.from, *tokenId, *spender);
  } else if (op == "approveMarket") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return revert(tokenId.error());
    st = eco.approve_nft(tx.from, *tokenId, eco.market_address());
  } else if (op == "transferNft") {
    auto from = addr_arg(args, "from");
    auto to = addr_arg(args, "to");
    auto tokenId = uint_arg(args, "tokenId");
    if (!from) return revert(from.error());
    if (!to) return revert(to.error());
    if (!tokenId) return revert(tokenId.error());
    st = eco.transfer_nft(tx.from, *from, *to, *tokenId);
  } else if (op == "listNft") {
    auto tokenId = uint_arg(args, "tokenId");
    auto price = uint_arg(args, "priceDmd");
    if (!tokenId) return revert(tokenId.error());
    if (!price) return revert(price.error());
    st = eco.list_nft(tx.from, *tokenId, *price);
  } else if (op == "buyNft") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return revert(tokenId.error());
    st = eco.buy_nft(tx.from, *tokenId);
  } else if (op == "cancelListing") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return revert(tokenId.error());
    st = eco.cancel_listing(tx.from, *tokenId);
  } else if (op == "grantReward") {
    Address user = tx.from;
    if (args.contains("user")) {
      auto u = addr_arg(args, "user");
      if (!u) return revert(u.error());
      user = *u;
    }
    if (tx.from != user && tx.from != eco.operator_address())
      return revert(Error{Err::NotAuthorized, "rewards are granted by the user or operator"});
    auto tokenId = uint_arg(args, "petTokenId");
    if (!tokenId) return revert(tokenId.error());
    if (!args.contains("record"))
      return revert(Error{Err::BadRequest, "missing workout record"});
    auto record = record_from_json(args["record"]);
    if (!record) return revert(record.error());
    auto grant = eco.grant_reward(user, *tokenId, *record);
    if (!grant) return revert(grant.error());
  } else {
    return revert(Error{Err::BadRequest, "unknown operation: " + op});
  }
  if (!st) return revert(st.error());
  return out;
}

void LedgerSim::stamp_events(TokenEconomy& economy, const Address& contract, BlockNumber block,
                             const Hash32& txHash, std::uint32_t* eventIndex) {
  for (Event& e : economy.drain_events()) {
    StampedEvent s;
    s.seq = nextSeq_++;
    s.block = block;
    s.indexInBlock = (*eventIndex)++;
    s.txHash = txHash;
    s.contract = contract;
    s.body = std::move(e);
    journal_.push_back(std::move(s));
  }
}

std::optional<Receipt> LedgerSim::receipt_of(const Hash32& txHash) const {
  auto it = receipts_.find(txHash);
  if (it == receipts_.end()) return std::nullopt;
  return it->second;
}

bool LedgerSim::has_contract(const Address& address) const {
  return contracts_.contains(address);
}

const TokenEconomy* LedgerSim::economy_of(const Address& contract) const {
  auto it = contracts_.find(contract);
  if (it == contracts_.end() || it->second.facet == Facet::Opaque) return nullptr;
  return economies_[it->second.economyIndex].get();
}

Result<nlohmann::json> LedgerSim::call_view(const Address& contract, std::string_view op,
                                            const json& args) const {
  auto it = contracts_.find(contract);
  if (it == contracts_.end())
    return Error{Err::UnknownContract, "no contract at " + contract.hex()};
  if (it->second.facet == Facet::Opaque)
    return Error{Err::WrongStandard, "contract has no token interface"};
  const TokenEconomy& eco = *economies_[it->second.economyIndex];

  if (op == "balanceOf") {
    auto a = addr_arg(args, "address");
    if (!a) return a.error();
    return json(eco.balance_of(*a));
  }
  if (op == "allowance") {
    auto owner = addr_arg(args, "owner");
    auto spender = addr_arg(args, "spender");
    if (!owner) return owner.error();
    if (!spender) return spender.error();
    return json(eco.allowance(*owner, *spender));
  }
  if (op == "totalSupply") return json(eco.total_supply());
  if (op == "ownerOf") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return tokenId.error();
    auto owner = eco.owner_of(*tokenId);
    return owner ? json(owner->hex()) : json(nullptr);
  }
  if (op == "petBonusRate") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return tokenId.error();
    auto rate = eco.pet_bonus_rate(*tokenId);
    return rate ? json(*rate) : json(nullptr);
  }
  if (op == "listingOf") {
    auto tokenId = uint_arg(args, "tokenId");
    if (!tokenId) return tokenId.error();
    auto listing = eco.active_listing(*tokenId);
    if (!listing) return json(nullptr);
    return json{{"seller", listing->seller.hex()}, {"priceDmd", listing->priceDmd}};
  }
  if (op == "isEarnable") {
    auto a = addr_arg(args, "address");
    if (!a) return a.error();
    return json(eco.is_earnable(*a));
  }
  if (op == "petCount") {
    auto a = addr_arg(args, "address");
    if (!a) return a.error();
    return json(eco.pet_count(*a));
  }
  if (op == "petsOf") {
    auto a = addr_arg(args, "address");
    if (!a) return a.error();
    return json(eco.pets_of(*a));
  }
  if (op == "mintedPets") return json(eco.minted_pets());
  if (op == "marketAddress") return json(eco.market_address().hex());
  if (op == "operatorAddress") return json(eco.operator_address().hex());
  if (op == "rateDmdPerNative") return json(eco.rate_dmd_per_native());
  if (op == "stateDigest") {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(eco.state_digest()));
    return json(std::string(buf));
  }
  return Error{Err::BadRequest, "unknown view: " + std::string(op)};
}

std::uint64_t LedgerSim::state_digest() const {
  Digest d;
  d.feed_u64(height_);
  d.feed_u64(static_cast<std::uint64_t>(now_));
  d.feed_u64(nextSeq_);
  d.feed_u64(accounts_.size());
  for (const auto& [addr, acct] : accounts_) {
    d.feed(addr);
    d.feed_u64(acct.balance);
    d.feed_u64(acct.nonce);
  }
  d.feed_u64(contracts_.size());
  for (const auto& [addr, c] : contracts_) {
    d.feed(addr);
    d.feed_u64(static_cast<std::uint64_t>(c.facet));
    d.feed_u64(c.economyIndex);
  }
  d.feed_u64(economies_.size());
  for (const auto& eco : economies_) d.feed_u64(eco->state_digest());
  d.feed_u64(journal_.size());
  return d.value();
}

}  // namespace w2e
