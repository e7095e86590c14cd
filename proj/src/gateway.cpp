#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "w2e/gateway.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "w2e/crypto.hpp"

namespace w2e {

using nlohmann::json;

namespace {

Result<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Err::IoError, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(std::string_view text) {
  const auto digest = sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return to_hex(digest);
}

std::string quantity_hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

Result<std::uint64_t> parse_quantity(const json& j, std::string_view what) {
  if (!j.is_string())
    return Error{Err::BadRequest, std::string(what) + ": expected hex quantity"};
  std::string s = j.get<std::string>();
  if (s.starts_with("0x") || s.starts_with("0X")) s = s.substr(2);
  if (s.empty() || s.size() > 16) {
    if (s.size() > 16) return std::uint64_t(-1);  // clamp oversized quantities
    return Error{Err::BadRequest, std::string(what) + ": empty hex quantity"};
  }
  std::uint64_t v = 0;
  for (char c : s) {
    int nibble;
    if (c >= '0' && c <= '9') nibble = c - '0';
    else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
    else return Error{Err::BadRequest, std::string(what) + ": bad hex quantity"};
    v = (v << 4) | static_cast<std::uint64_t>(nibble);
  }
  return v;
}

std::string strip_0x(std::string_view s) {
  if (s.starts_with("0x") || s.starts_with("0X")) return std::string(s.substr(2));
  return std::string(s);
}

}  // namespace

// ---- NetworkProfile ----

std::string NetworkProfile::slug() const {
  std::string out;
  bool lastUnderscore = true;  // trims leading separators
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      lastUnderscore = false;
    } else if (!lastUnderscore) {
      out.push_back('_');
      lastUnderscore = true;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

Status NetworkProfile::validate() const {
  if (name.empty()) return Error{Err::BadProfile, "profile name is empty"};
  if (kind != "sim" && kind != "rpc")
    return Error{Err::BadProfile, "profile kind must be sim or rpc: " + kind};
  if (kind == "rpc" && rpcUrl.empty())
    return Error{Err::BadProfile, "rpc profile needs rpcUrl: " + name};
  if (pollIntervalMs <= 0) return Error{Err::BadProfile, "pollIntervalMs must be positive"};
  if (timeoutMs <= 0) return Error{Err::BadProfile, "timeoutMs must be positive"};
  if (kind == "sim")
    if (auto st = sim.validate(); !st)
      return Error{Err::BadProfile, name + ": " + st.error().to_string()};
  return {};
}

json NetworkProfile::to_json() const {
  json j{{"name", name},
         {"kind", kind},
         {"chainId", chainId},
         {"pollIntervalMs", pollIntervalMs},
         {"timeoutMs", timeoutMs}};
  if (!rpcUrl.empty()) j["rpcUrl"] = rpcUrl;
  if (kind == "sim") j["sim"] = sim.to_json();
  return j;
}

Result<NetworkProfile> NetworkProfile::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadProfile, "profile must be an object"};
  NetworkProfile p;
  p.name = j.value("name", "");
  p.kind = j.value("kind", "sim");
  p.chainId = j.value("chainId", std::uint64_t{0});
  p.pollIntervalMs = j.value("pollIntervalMs", TimeMs{250});
  p.timeoutMs = j.value("timeoutMs", TimeMs{120'000});
  p.rpcUrl = j.value("rpcUrl", "");
  if (j.contains("sim")) {
    auto cfg = ChainConfig::from_json(j["sim"]);
    if (!cfg) return cfg.error();
    p.sim = *cfg;
  }
  std::string envName = "W2E_RPC_URL_" + p.slug();
  for (char& c : envName) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (const char* url = std::getenv(envName.c_str()); url != nullptr && *url != '\0') {
    p.kind = "rpc";
    p.rpcUrl = url;
  }
  if (auto st = p.validate(); !st) return st.error();
  return p;
}

// ---- ProfileRegistry ----

Result<ProfileRegistry> ProfileRegistry::load_file(const std::string& path) {
  auto text = read_file(path);
  if (!text) return text.error();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded()) return Error{Err::BadProfile, "profile file is not valid JSON: " + path};
  auto reg = from_json(j);
  if (!reg) return reg.error();
  reg->sourceHash_ = sha256_hex(*text);
  return reg;
}

Result<ProfileRegistry> ProfileRegistry::from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1)
    return Error{Err::SchemaMismatch, "profile file version must be 1"};
  if (!j.contains("profiles") || !j["profiles"].is_array())
    return Error{Err::BadProfile, "profile file has no profiles array"};
  ProfileRegistry reg;
  for (const json& pj : j["profiles"]) {
    auto p = NetworkProfile::from_json(pj);
    if (!p) return p.error();
    if (reg.by_name(p->name) != nullptr)
      return Error{Err::BadProfile, "duplicate profile name: " + p->name};
    reg.profiles_.push_back(std::move(*p));
  }
  if (reg.profiles_.empty()) return Error{Err::BadProfile, "profile file lists no networks"};
  reg.sourceHash_ = sha256_hex(j.dump());
  return reg;
}

const NetworkProfile* ProfileRegistry::by_name(std::string_view name) const {
  for (const auto& p : profiles_)
    if (p.name == name) return &p;
  return nullptr;
}

// ---- ContractArtifact ----

Status ContractArtifact::validate() const {
  if (name.empty()) return Error{Err::BadArtifact, "artifact name is empty"};
  if (standard.empty()) return Error{Err::BadArtifact, "artifact standard is empty"};
  if (bytecodeHex.empty() || bytecodeHex.size() % 2 != 0)
    return Error{Err::BadArtifact, "artifact bytecode hex is empty or odd-length"};
  if (!from_hex(bytecodeHex))
    return Error{Err::BadArtifact, "artifact bytecode is not valid hex"};
  return {};
}

Result<ContractArtifact> ContractArtifact::load_file(const std::string& path) {
  auto text = read_file(path);
  if (!text) return text.error();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded())
    return Error{Err::BadArtifact, "artifact file is not valid JSON: " + path};
  return from_json(j);
}

Result<ContractArtifact> ContractArtifact::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadArtifact, "artifact must be an object"};
  ContractArtifact a;
  a.name = j.value("name", "");
  a.standard = j.value("standard", "");
  a.bytecodeHex = strip_0x(j.value("bytecodeHex", ""));
  a.abi = j.value("abi", json::array());
  if (j.contains("constructor") && j["constructor"].is_array())
    for (const json& p : j["constructor"]) a.constructorParams.push_back(p.get<std::string>());
  if (auto st = a.validate(); !st) return st.error();
  return a;
}

// ---- signing ----

Result<std::string> JsonBlobSigner::sign(const Transaction& tx) const {
  if (tx.from != account_)
    return Error{Err::NotAuthorized, "signer holds " + account_.hex() + ", tx is from " +
                                         tx.from.hex()};
  const std::string canon = tx.to_json().dump();
  return to_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size()));
}

Result<Transaction> decode_raw_tx(std::string_view rawHex) {
  auto bytes = from_hex(strip_0x(rawHex));
  if (!bytes) return Error{Err::BadRequest, "raw transaction is not valid hex"};
  json j = json::parse(bytes->begin(), bytes->end(), nullptr, false);
  if (j.is_discarded()) return Error{Err::BadRequest, "raw transaction is not a JSON blob"};
  return Transaction::from_json(j);
}

// ---- SimBackend ----

SimBackend::SimBackend(const ChainConfig& config) : sim_(config) {}

Result<Wei> SimBackend::native_balance(const Address& account) {
  return sim_.native_balance(account);
}

Result<std::uint64_t> SimBackend::nonce_of(const Address& account) {
  return sim_.nonce_of(account);
}

Result<Gas> SimBackend::estimate_gas(const Transaction& tx) { return sim_.required_gas(tx); }

Result<Hash32> SimBackend::send_raw(const std::string& rawHex) {
  auto tx = decode_raw_tx(rawHex);
  if (!tx) return tx.error();
  return sim_.submit_tx(*tx);
}

Result<std::optional<Receipt>> SimBackend::receipt_of(const Hash32& txHash) {
  auto r = sim_.receipt_of(txHash);
  if (!r || !r->confirmed) return std::optional<Receipt>{};
  return std::optional<Receipt>{*r};
}

Result<json> SimBackend::call_view(const Address& contract, std::string_view op,
                                   const json& args) {
  return sim_.call_view(contract, op, args);
}

void SimBackend::poll_wait(TimeMs ms) {
  (void)sim_.advance_to(sim_.now_ms() + ms);
}

Status SimBackend::align_to_next_block() {
  auto r = sim_.advance_to(sim_.next_block_time());
  if (!r) return r.error();
  return {};
}

// ---- RpcBackend ----

struct RpcBackend::Impl {
  std::string url;
  httplib::Client client;
  TimeMs timeoutMs;
  std::uint64_t nextId = 1;

  Impl(std::string u, TimeMs t) : url(std::move(u)), client(url), timeoutMs(t) {
    const auto secs = std::chrono::seconds(std::max<TimeMs>(1, t / 1000));
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    client.set_keep_alive(true);
  }
};

RpcBackend::RpcBackend(std::string url, TimeMs requestTimeoutMs)
    : impl_(std::make_unique<Impl>(std::move(url), requestTimeoutMs)) {}

RpcBackend::~RpcBackend() = default;

Result<json> RpcBackend::rpc(std::string_view method, json params) {
  const json req{{"jsonrpc", "2.0"},
                 {"id", impl_->nextId++},
                 {"method", std::string(method)},
                 {"params", std::move(params)}};
  auto res = impl_->client.Post("/", req.dump(), "application/json");
  if (!res)
    return Error{Err::EndpointUnreachable,
                 impl_->url + ": " + httplib::to_string(res.error())};
  if (res->status != 200)
    return Error{Err::EndpointUnreachable,
                 impl_->url + ": HTTP " + std::to_string(res->status)};
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded())
    return Error{Err::BadRequest, std::string(method) + ": response is not JSON"};
  if (body.contains("error") && !body["error"].is_null()) {
    const std::string msg = body["error"].value("message", "unknown RPC error");
    const bool isRevert = msg.find("revert") != std::string::npos;
    return Error{isRevert ? Err::Reverted : Err::BadRequest,
                 std::string(method) + ": " + msg};
  }
  if (!body.contains("result"))
    return Error{Err::BadRequest, std::string(method) + ": response has no result"};
  return body["result"];
}

Result<std::uint64_t> RpcBackend::chain_id() {
  auto r = rpc("eth_chainId", json::array());
  if (!r) return r.error();
  return parse_quantity(*r, "eth_chainId");
}

Result<double> RpcBackend::gas_price_gwei() {
  auto r = rpc("eth_gasPrice", json::array());
  if (!r) return r.error();
  auto wei = parse_quantity(*r, "eth_gasPrice");
  if (!wei) return wei.error();
  return static_cast<double>(*wei) / 1e9;
}

Result<Wei> RpcBackend::native_balance(const Address& account) {
  auto r = rpc("eth_getBalance", json::array({account.hex(), "latest"}));
  if (!r) return r.error();
  return parse_quantity(*r, "eth_getBalance");
}

Result<std::uint64_t> RpcBackend::nonce_of(const Address& account) {
  auto r = rpc("eth_getTransactionCount", json::array({account.hex(), "latest"}));
  if (!r) return r.error();
  return parse_quantity(*r, "eth_getTransactionCount");
}

Result<Gas> RpcBackend::estimate_gas(const Transaction& tx) {
  json call{{"from", tx.from.hex()},
            {"data", "0x" + to_hex(tx.payload)},
            {"value", quantity_hex(tx.valueWei)}};
  if (tx.to) call["to"] = tx.to->hex();
  auto r = rpc("eth_estimateGas", json::array({std::move(call)}));
  if (!r) return r.error();
  return parse_quantity(*r, "eth_estimateGas");
}

Result<Hash32> RpcBackend::send_raw(const std::string& rawHex) {
  const std::string param = rawHex.starts_with("0x") ? rawHex : "0x" + rawHex;
  auto r = rpc("eth_sendRawTransaction", json::array({param}));
  if (!r) return r.error();
  if (!r->is_string()) return Error{Err::BadRequest, "eth_sendRawTransaction: bad hash"};
  auto h = Hash32::from_hex(strip_0x(r->get<std::string>()));
  if (!h) return Error{Err::BadRequest, "eth_sendRawTransaction: bad hash"};
  return *h;
}

Result<std::optional<Receipt>> RpcBackend::receipt_of(const Hash32& txHash) {
  auto r = rpc("eth_getTransactionReceipt", json::array({txHash.hex()}));
  if (!r) return r.error();
  if (r->is_null()) return std::optional<Receipt>{};
  const json& j = *r;
  Receipt receipt;
  receipt.txHash = txHash;
  auto block = parse_quantity(j.value("blockNumber", json("0x0")), "blockNumber");
  if (!block) return block.error();
  receipt.blockNumber = *block;
  auto status = parse_quantity(j.value("status", json("0x1")), "status");
  if (!status) return status.error();
  receipt.success = *status == 1;
  auto gasUsed = parse_quantity(j.value("gasUsed", json("0x0")), "gasUsed");
  if (!gasUsed) return gasUsed.error();
  receipt.gasUsed = *gasUsed;
  auto priceWei = parse_quantity(j.value("effectiveGasPrice", json("0x0")),
                                 "effectiveGasPrice");
  if (!priceWei) return priceWei.error();
  receipt.feeGwei = fee_gwei(receipt.gasUsed, static_cast<double>(*priceWei) / 1e9);
  if (j.contains("contractAddress") && j["contractAddress"].is_string()) {
    auto a = Address::from_hex(strip_0x(j["contractAddress"].get<std::string>()));
    if (a) receipt.contractAddress = *a;
  }
  // Extensions carried by the simulator-backed wire server.
  receipt.submittedAtMs = j.value("submittedAtMs", TimeMs{0});
  receipt.confirmedAtMs = j.value("confirmedAtMs", TimeMs{0});
  receipt.revertReason = j.value("revertReason", "");
  receipt.confirmed = true;
  return std::optional<Receipt>{receipt};
}

Result<json> RpcBackend::call_view(const Address& contract, std::string_view op,
                                   const json& args) {
  const std::string body =
      json{{"view", json{{"op", std::string(op)}, {"args", args}}}}.dump();
  const json call{{"to", contract.hex()},
                  {"data", "0x" + to_hex(std::span<const std::uint8_t>(
                                      reinterpret_cast<const std::uint8_t*>(body.data()),
                                      body.size()))}};
  auto r = rpc("eth_call", json::array({call, "latest"}));
  if (!r) return r.error();
  if (!r->is_string()) return Error{Err::BadRequest, "eth_call: expected hex data"};
  auto bytes = from_hex(strip_0x(r->get<std::string>()));
  if (!bytes) return Error{Err::BadRequest, "eth_call: bad hex data"};
  json out = json::parse(bytes->begin(), bytes->end(), nullptr, false);
  if (out.is_discarded()) return Error{Err::BadRequest, "eth_call: bad payload"};
  return out;
}

void RpcBackend::poll_wait(TimeMs ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

Result<std::shared_ptr<ChainBackend>> make_backend(const NetworkProfile& profile) {
  if (auto st = profile.validate(); !st) return st.error();
  if (profile.kind == "sim") {
    auto backend = std::make_shared<SimBackend>(profile.sim);
    backend->set_chain_id(profile.chainId);
    return std::shared_ptr<ChainBackend>(std::move(backend));
  }
  return std::shared_ptr<ChainBackend>(std::make_shared<RpcBackend>(profile.rpcUrl));
}

// ---- Gateway ----

Gateway::Gateway(NetworkProfile profile, std::shared_ptr<ChainBackend> backend,
                 std::unique_ptr<Signer> signer)
    : profile_(std::move(profile)), backend_(std::move(backend)), signer_(std::move(signer)) {}

Status Gateway::verify_connection() {
  auto id = backend_->chain_id();
  if (!id) return id.error();
  if (profile_.chainId != 0 && *id != profile_.chainId)
    return Error{Err::BadProfile, profile_.name + ": endpoint reports chain " +
                                      std::to_string(*id) + ", profile expects " +
                                      std::to_string(profile_.chainId)};
  return {};
}

Result<DeployResult> Gateway::deploy(const ContractArtifact& artifact, const json& ctorArgs) {
  if (auto st = artifact.validate(); !st) return st.error();
  Transaction tx;
  tx.from = signer_->account();
  tx.payload = encode_deploy(artifact.standard, artifact.bytecodeHex, ctorArgs);
  auto receipt = submit_and_wait(std::move(tx));
  if (!receipt) return receipt.error();
  if (!receipt->success)
    return Error{Err::Reverted, artifact.name + " deployment reverted: " +
                                    receipt->revertReason};
  if (!receipt->contractAddress)
    return Error{Err::BadRequest, "deployment receipt lacks contract address"};
  return DeployResult{*receipt->contractAddress, *receipt};
}

Result<Receipt> Gateway::call(const Address& contract, std::string_view op, const json& args,
                              Wei valueWei) {
  Transaction tx;
  tx.from = signer_->account();
  tx.to = contract;
  tx.payload = encode_call(op, args);
  tx.valueWei = valueWei;
  return submit_and_wait(std::move(tx));
}

Result<json> Gateway::view(const Address& contract, std::string_view op,
                           const json& args) const {
  return backend_->call_view(contract, op, args);
}

Result<Wei> Gateway::native_balance(const Address& account) const {
  return backend_->native_balance(account);
}

Result<Amount> Gateway::dmd_balance(const Address& account) const {
  if (!dmdContract_) return Error{Err::BadRequest, "no DMD contract bound"};
  auto v = backend_->call_view(*dmdContract_, "balanceOf", json{{"address", account.hex()}});
  if (!v) return v.error();
  if (!v->is_number_unsigned()) return Error{Err::BadRequest, "balanceOf: expected uint"};
  return v->get<Amount>();
}

Result<Receipt> Gateway::submit_and_wait(Transaction tx) {
  auto nonce = backend_->nonce_of(tx.from);
  if (!nonce) return nonce.error();
  tx.nonce = *nonce;
  auto gas = backend_->estimate_gas(tx);
  if (!gas) return gas.error();
  tx.gasLimit = *gas;
  auto raw = signer_->sign(tx);
  if (!raw) return raw.error();
  auto hash = backend_->send_raw(*raw);
  if (!hash) return hash.error();
  return poll_receipt(*hash);
}

Result<Receipt> Gateway::poll_receipt(const Hash32& txHash) {
  TimeMs waited = 0;
  for (;;) {
    auto r = backend_->receipt_of(txHash);
    if (!r) return r.error();
    if (*r && (*r)->confirmed) return **r;
    if (waited >= profile_.timeoutMs)
      return Error{Err::Timeout, "no confirmation for " + txHash.hex() + " within " +
                                     std::to_string(profile_.timeoutMs) + " ms"};
    backend_->poll_wait(profile_.pollIntervalMs);
    waited += profile_.pollIntervalMs;
  }
}

}  // namespace w2e
