#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <memory>

#include "support/mock_rpc_server.hpp"
#include "w2e/gateway.hpp"

using namespace w2e;
using nlohmann::json;

namespace {

Address actor(const std::string& who) { return address_from_label("test/" + who); }

ChainConfig fast_config() {
  ChainConfig c;
  c.blockIntervalMs = 500;
  c.gasPriceGwei = 4.7;
  c.inclusionBlocksMin = 1;
  c.inclusionBlocksMax = 2;
  c.overheadMsMin = 10;
  c.overheadMsMax = 30;
  c.rngSeed = 99;
  return c;
}

NetworkProfile sim_profile(const ChainConfig& cfg, std::uint64_t chainId = 42) {
  NetworkProfile p;
  p.name = "local sim";
  p.kind = "sim";
  p.chainId = chainId;
  p.pollIntervalMs = 100;
  p.timeoutMs = 60'000;
  p.sim = cfg;
  return p;
}

ContractArtifact erc20_artifact() {
  auto a = ContractArtifact::load_file(std::string(W2E_DEFAULT_DATA_DIR) +
                                       "/artifacts/erc20_dmd.json");
  REQUIRE(a);
  return *a;
}

ContractArtifact erc721_artifact() {
  auto a = ContractArtifact::load_file(std::string(W2E_DEFAULT_DATA_DIR) +
                                       "/artifacts/erc721_pets.json");
  REQUIRE(a);
  return *a;
}

std::string digest_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

TEST_CASE("profile slugs normalize names") {
  NetworkProfile p;
  p.name = "Eth 1.0 testnet";
  CHECK(p.slug() == "eth_1_0_testnet");
  p.name = "Private Eth 2.0";
  CHECK(p.slug() == "private_eth_2_0");
  p.name = "--Weird  name!!";
  CHECK(p.slug() == "weird_name");
}

TEST_CASE("environment variable rewires a profile to rpc") {
  const json pj{{"name", "Eth 1.0 testnet"},
                {"kind", "sim"},
                {"chainId", 5},
                {"sim", json{{"blockIntervalMs", 1000}}}};
  setenv("W2E_RPC_URL_ETH_1_0_TESTNET", "http://127.0.0.1:19999", 1);
  auto p = NetworkProfile::from_json(pj);
  unsetenv("W2E_RPC_URL_ETH_1_0_TESTNET");
  REQUIRE(p);
  CHECK(p->kind == "rpc");
  CHECK(p->rpcUrl == "http://127.0.0.1:19999");

  auto plain = NetworkProfile::from_json(pj);
  REQUIRE(plain);
  CHECK(plain->kind == "sim");
  CHECK(plain->rpcUrl.empty());
}

TEST_CASE("registry loads the shipped profile file") {
  auto reg = ProfileRegistry::load_file(std::string(W2E_DEFAULT_DATA_DIR) + "/profiles.json");
  REQUIRE(reg);
  REQUIRE(reg->profiles().size() == 6);
  const char* expected[] = {"Eth 1.0 testnet", "Eth 2.0 testnet", "Private Eth 1.0",
                            "Private Eth 2.0", "Polygon testnet", "Optimism testnet"};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(reg->profiles()[i].name == expected[i]);
    CHECK(reg->profiles()[i].validate());
  }
  CHECK(reg->by_name("Polygon testnet") != nullptr);
  CHECK(reg->by_name("Polygon testnet")->sim.gasPriceGwei == doctest::Approx(0.0407));
  CHECK(reg->by_name("no such network") == nullptr);
  CHECK(reg->source_hash().size() == 64);
}

TEST_CASE("registry rejects malformed profile files") {
  const json good{{"name", "A"}, {"kind", "sim"}, {"sim", json{{"blockIntervalMs", 1000}}}};
  auto badVersion = ProfileRegistry::from_json(json{{"version", 2}, {"profiles", json::array({good})}});
  REQUIRE_FALSE(badVersion);
  CHECK(badVersion.code() == Err::SchemaMismatch);

  auto dup = ProfileRegistry::from_json(json{{"version", 1}, {"profiles", json::array({good, good})}});
  REQUIRE_FALSE(dup);
  CHECK(dup.code() == Err::BadProfile);

  auto empty = ProfileRegistry::from_json(json{{"version", 1}, {"profiles", json::array()}});
  REQUIRE_FALSE(empty);
  CHECK(empty.code() == Err::BadProfile);
}

TEST_CASE("signer only signs for its own account") {
  const Address mine = actor("signer");
  JsonBlobSigner signer(mine);

  Transaction tx;
  tx.from = mine;
  tx.to = actor("peer");
  tx.payload = encode_call("transfer", json{{"to", actor("peer").hex()}, {"amount", 7}});
  tx.valueWei = 5;
  tx.gasLimit = 51'000;
  tx.nonce = 3;
  auto raw = signer.sign(tx);
  REQUIRE(raw);
  auto decoded = decode_raw_tx(*raw);
  REQUIRE(decoded);
  CHECK(decoded->to_json() == tx.to_json());

  tx.from = actor("somebody-else");
  auto foreign = signer.sign(tx);
  REQUIRE_FALSE(foreign);
  CHECK(foreign.code() == Err::NotAuthorized);

  CHECK(decode_raw_tx("zz").code() == Err::BadRequest);
  CHECK(decode_raw_tx("6e6f74206a736f6e").code() == Err::BadRequest);  // "not json"
}

TEST_CASE("gateway deploys and operates contracts on the sim backend") {
  const Address op = actor("operator");
  const Address alice = actor("alice");
  const Address bob = actor("bob");

  NetworkProfile prof = sim_profile(fast_config());
  auto made = make_backend(prof);
  REQUIRE(made);
  std::shared_ptr<ChainBackend> backend = *made;
  auto* simB = dynamic_cast<SimBackend*>(backend.get());
  REQUIRE(simB != nullptr);
  simB->sim().faucet(op, 1000 * kWeiPerNative);
  simB->sim().faucet(alice, 1000 * kWeiPerNative);

  Gateway asOp(prof, backend, std::make_unique<JsonBlobSigner>(op));
  Gateway asAlice(prof, backend, std::make_unique<JsonBlobSigner>(alice));
  CHECK(asOp.verify_connection());

  auto dmd = asOp.deploy(erc20_artifact(), json{{"rateDmdPerNative", 1000}});
  REQUIRE(dmd);
  CHECK(dmd->receipt.success);
  CHECK(dmd->receipt.gasUsed == 1'200'000);
  CHECK(dmd->receipt.feeGwei == fee_gwei(1'200'000, 4.7));
  asOp.bind_dmd(dmd->address);
  asAlice.bind_dmd(dmd->address);

  auto mint = asOp.call(dmd->address, "mintDmd", json{{"to", alice.hex()}, {"amount", 1234}});
  REQUIRE(mint);
  CHECK(mint->success);
  CHECK(*asOp.dmd_balance(alice) == 1234);
  CHECK(asOp.view(dmd->address, "totalSupply", json::object())->get<Amount>() == 1234);

  auto pay = asAlice.call(dmd->address, "transfer", json{{"to", bob.hex()}, {"amount", 234}});
  REQUIRE(pay);
  CHECK(pay->success);
  CHECK(*asAlice.dmd_balance(alice) == 1000);
  CHECK(*asAlice.dmd_balance(bob) == 234);

  // a reverted call is a receipt outcome, not a transport error
  auto broke = asAlice.call(dmd->address, "transfer", json{{"to", bob.hex()}, {"amount", 10'000}});
  REQUIRE(broke);
  CHECK_FALSE(broke->success);
  CHECK(broke->revertReason == "InsufficientBalance");
  CHECK(broke->gasUsed == 51'000);

  // a reverted deployment is an error: there is no usable address
  auto dangling = asOp.deploy(erc721_artifact(), json{{"dmd", actor("nowhere").hex()}});
  REQUIRE_FALSE(dangling);
  CHECK(dangling.code() == Err::Reverted);

  auto second = asOp.deploy(erc20_artifact(), json::object());
  REQUIRE(second);
  CHECK(second->address != dmd->address);

  auto pets = asOp.deploy(erc721_artifact(), json{{"dmd", dmd->address.hex()}});
  REQUIRE(pets);
  CHECK(pets->receipt.gasUsed == 1'150'000);
  auto pet = asOp.call(pets->address, "mintPet", json{{"to", alice.hex()}, {"bonusRatePct", 150}});
  REQUIRE(pet);
  CHECK(pet->success);
  CHECK(asOp.view(pets->address, "ownerOf", json{{"tokenId", 1}})->get<std::string>() ==
        alice.hex());
}

TEST_CASE("chain id mismatches and unreachable endpoints are reported") {
  NetworkProfile prof = sim_profile(fast_config(), 8);
  auto backend = std::make_shared<SimBackend>(prof.sim);
  backend->set_chain_id(7);
  Gateway gw(prof, backend, std::make_unique<JsonBlobSigner>(actor("operator")));
  auto st = gw.verify_connection();
  REQUIRE_FALSE(st);
  CHECK(st.code() == Err::BadProfile);

  prof.chainId = 0;  // profile opts out of the check
  Gateway loose(prof, backend, std::make_unique<JsonBlobSigner>(actor("operator")));
  CHECK(loose.verify_connection());

  RpcBackend dead("http://127.0.0.1:9", 2000);
  auto id = dead.chain_id();
  REQUIRE_FALSE(id);
  CHECK(id.code() == Err::EndpointUnreachable);

  NetworkProfile rpcProf;
  rpcProf.name = "dead endpoint";
  rpcProf.kind = "rpc";
  rpcProf.rpcUrl = "http://127.0.0.1:9";
  auto made = make_backend(rpcProf);
  REQUIRE(made);
  Gateway deadGw(rpcProf, *made, std::make_unique<JsonBlobSigner>(actor("operator")));
  auto verdict = deadGw.verify_connection();
  REQUIRE_FALSE(verdict);
  CHECK(verdict.code() == Err::EndpointUnreachable);
}

TEST_CASE("receipt polling times out when nothing confirms") {
  ChainConfig slow = fast_config();
  slow.blockIntervalMs = 600'000;
  NetworkProfile prof = sim_profile(slow);
  prof.pollIntervalMs = 50;
  prof.timeoutMs = 200;
  auto made = make_backend(prof);
  REQUIRE(made);
  dynamic_cast<SimBackend*>(made->get())->sim().faucet(actor("operator"), 1000 * kWeiPerNative);
  Gateway gw(prof, *made, std::make_unique<JsonBlobSigner>(actor("operator")));
  auto r = gw.deploy(erc20_artifact(), json::object());
  REQUIRE_FALSE(r);
  CHECK(r.code() == Err::Timeout);
}

TEST_CASE("mock rpc server speaks the full wire contract") {
  const Address op = actor("operator");
  const Address alice = actor("alice");
  const ChainConfig cfg = fast_config();

  testing::MockRpcServer server(cfg, 777, 400.0);
  server.sim().faucet(op, 1000 * kWeiPerNative);
  server.sim().faucet(alice, 1000 * kWeiPerNative);
  const std::string url = server.start();

  NetworkProfile prof;
  prof.name = "mock";
  prof.kind = "rpc";
  prof.chainId = 777;
  prof.rpcUrl = url;
  prof.pollIntervalMs = 25;
  prof.timeoutMs = 20'000;
  auto made = make_backend(prof);
  REQUIRE(made);
  std::shared_ptr<ChainBackend> backend = *made;

  CHECK(*backend->chain_id() == 777);
  CHECK(*backend->gas_price_gwei() == doctest::Approx(4.7));
  CHECK(*backend->native_balance(op) == 1000 * kWeiPerNative);
  CHECK(*backend->nonce_of(op) == 0);

  Gateway asOp(prof, backend, std::make_unique<JsonBlobSigner>(op));
  Gateway asAlice(prof, backend, std::make_unique<JsonBlobSigner>(alice));
  CHECK(asOp.verify_connection());

  auto dmd = asOp.deploy(erc20_artifact(), json{{"rateDmdPerNative", 1000}});
  REQUIRE(dmd);
  CHECK(dmd->receipt.success);
  CHECK(dmd->receipt.gasUsed == 1'200'000);
  CHECK(dmd->receipt.confirmed);
  CHECK(dmd->receipt.confirmedAtMs > dmd->receipt.submittedAtMs);
  asOp.bind_dmd(dmd->address);

  auto mint = asOp.call(dmd->address, "mintDmd", json{{"to", alice.hex()}, {"amount", 500}});
  REQUIRE(mint);
  CHECK(mint->success);
  CHECK(*asOp.dmd_balance(alice) == 500);
  CHECK(asOp.view(dmd->address, "totalSupply", json::object())->get<Amount>() == 500);

  auto broke = asAlice.call(dmd->address, "transfer",
                            json{{"to", op.hex()}, {"amount", 10'000}});
  REQUIRE(broke);
  CHECK_FALSE(broke->success);
  CHECK(broke->revertReason == "InsufficientBalance");
  CHECK(broke->gasUsed == 51'000);
  CHECK(broke->feeGwei == fee_gwei(51'000, 4.7));

  // view failures surface as reverts through eth_call
  auto badView = asOp.view(dmd->address, "balanceOf", json::object());
  REQUIRE_FALSE(badView);
  CHECK(badView.code() == Err::Reverted);

  // garbage raw transactions are rejected without the revert marker
  auto garbage = backend->send_raw("0xzz");
  REQUIRE_FALSE(garbage);
  CHECK(garbage.code() == Err::BadRequest);
}

namespace {

// One scripted market day, expressed as wire calls so the same sequence can
// run over different backends and be compared outcome by outcome.
struct WireStep {
  std::string submitter;  // "op" or "alice"
  std::string op;
  json args;
  Wei value = 0;
};

struct ScriptOutcome {
  std::string summary;            // one line per action: op|success|reason|gas|fee
  Address dmd, pets;
  std::string digest;             // economy state digest via the view
  Amount balOp = 0, balAlice = 0, balBob = 0;
};

std::vector<WireStep> wire_script(const Address& op, const Address& alice, const Address& bob,
                                  const Address& market) {
  const json rec{{"durationSec", 3600}, {"distanceM", 5000}, {"avgSpeedKmh", 5.0},
                 {"steps", 6000},       {"startedAt", 1'700'000'000}};
  return {
      {"op", "mintDmd", json{{"to", alice.hex()}, {"amount", 2000}}},
      {"op", "mintPet", json{{"to", alice.hex()}, {"bonusRatePct", 150}}},
      {"op", "mintPet", json{{"to", bob.hex()}, {"bonusRatePct", 120}}},
      {"alice", "transfer", json{{"to", bob.hex()}, {"amount", 250}}},
      {"alice", "approve", json{{"spender", op.hex()}, {"amount", 100}}},
      {"op", "transferFrom", json{{"owner", alice.hex()}, {"to", bob.hex()}, {"amount", 60}}},
      {"alice", "approveNft", json{{"tokenId", 1}, {"spender", market.hex()}}},
      {"alice", "listNft", json{{"tokenId", 1}, {"priceDmd", 400}}},
      {"op", "transfer", json{{"to", alice.hex()}, {"amount", 10}}},  // op holds no DMD
      {"alice", "buyDmd", json::object(), kWeiPerNative / 20},
      {"alice", "cancelListing", json{{"tokenId", 1}}},
      {"alice", "listNft", json{{"tokenId", 1}, {"priceDmd", 500}}},
      {"op", "grantReward", json{{"user", alice.hex()}, {"petTokenId", 1}, {"record", rec}}},
      {"alice", "transferNft", json{{"from", alice.hex()}, {"to", bob.hex()}, {"tokenId", 1}}},
      {"alice", "buyNft", json{{"tokenId", 1}}},   // listing went stale above
      {"op", "grantReward", json{{"user", alice.hex()}, {"petTokenId", 1}, {"record", rec}}},
      {"alice", "cancelListing", json{{"tokenId", 1}}},
  };
}

ScriptOutcome run_script_over(Gateway& asOp, Gateway& asAlice, const Address& op,
                              const Address& alice, const Address& bob) {
  ScriptOutcome out;
  auto dmd = asOp.deploy(erc20_artifact(), json{{"rateDmdPerNative", 1000}});
  REQUIRE(dmd);
  auto pets = asOp.deploy(erc721_artifact(), json{{"dmd", dmd->address.hex()}});
  REQUIRE(pets);
  out.dmd = dmd->address;
  out.pets = pets->address;
  asOp.bind_dmd(dmd->address);

  const std::string market =
      asOp.view(dmd->address, "marketAddress", json::object())->get<std::string>();
  auto marketAddr = Address::from_hex(market);
  REQUIRE(marketAddr);

  for (const WireStep& step : wire_script(op, alice, bob, *marketAddr)) {
    Gateway& gw = step.submitter == "op" ? asOp : asAlice;
    const bool erc20Op = step.op == "transfer" || step.op == "approve" ||
                         step.op == "transferFrom" || step.op == "mintDmd" ||
                         step.op == "buyDmd";
    const Address target = erc20Op ? dmd->address : pets->address;
    auto r = gw.call(target, step.op, step.args, step.value);
    REQUIRE(r);
    char line[160];
    std::snprintf(line, sizeof line, "%s|%d|%s|%llu|%.6f\n", step.op.c_str(),
                  r->success ? 1 : 0, r->revertReason.c_str(),
                  static_cast<unsigned long long>(r->gasUsed), r->feeGwei);
    out.summary += line;
  }

  out.digest = asOp.view(dmd->address, "stateDigest", json::object())->get<std::string>();
  out.balOp = *asOp.dmd_balance(op);
  out.balAlice = *asOp.dmd_balance(alice);
  out.balBob = *asOp.dmd_balance(bob);
  return out;
}

}  // namespace

TEST_CASE("sim and rpc backends agree with direct token-core execution") {
  const Address op = actor("operator");
  const Address alice = actor("alice");
  const Address bob = actor("bob");
  const ChainConfig cfg = fast_config();

  // lane 1: gateways over the in-process sim backend
  NetworkProfile simProf = sim_profile(cfg, 31);
  auto simMade = make_backend(simProf);
  REQUIRE(simMade);
  auto* simB = dynamic_cast<SimBackend*>(simMade->get());
  simB->sim().faucet(op, 1000 * kWeiPerNative);
  simB->sim().faucet(alice, 1000 * kWeiPerNative);
  Gateway simOp(simProf, *simMade, std::make_unique<JsonBlobSigner>(op));
  Gateway simAlice(simProf, *simMade, std::make_unique<JsonBlobSigner>(alice));
  const ScriptOutcome viaSim = run_script_over(simOp, simAlice, op, alice, bob);

  // lane 2: the same gateways over HTTP against the mock JSON-RPC server
  testing::MockRpcServer server(cfg, 31, 400.0);
  server.sim().faucet(op, 1000 * kWeiPerNative);
  server.sim().faucet(alice, 1000 * kWeiPerNative);
  NetworkProfile rpcProf;
  rpcProf.name = "mock";
  rpcProf.kind = "rpc";
  rpcProf.chainId = 31;
  rpcProf.rpcUrl = server.start();
  rpcProf.pollIntervalMs = 25;
  rpcProf.timeoutMs = 20'000;
  auto rpcMade = make_backend(rpcProf);
  REQUIRE(rpcMade);
  Gateway rpcOp(rpcProf, *rpcMade, std::make_unique<JsonBlobSigner>(op));
  Gateway rpcAlice(rpcProf, *rpcMade, std::make_unique<JsonBlobSigner>(alice));
  const ScriptOutcome viaRpc = run_script_over(rpcOp, rpcAlice, op, alice, bob);

  CHECK(viaSim.summary == viaRpc.summary);
  CHECK(viaSim.dmd == viaRpc.dmd);
  CHECK(viaSim.pets == viaRpc.pets);
  CHECK(viaSim.digest == viaRpc.digest);
  CHECK(viaSim.balOp == viaRpc.balOp);
  CHECK(viaSim.balAlice == viaRpc.balAlice);
  CHECK(viaSim.balBob == viaRpc.balBob);

  // lane 3: the token economy driven directly, no chain in between
  TokenEconomy eco(op, 1000);
  MapNativeLedger native;
  native.credit(alice, 1000 * kWeiPerNative);
  std::string direct;
  const OperationCosts costs;  // defaults match the profile
  for (const WireStep& step : wire_script(op, alice, bob, eco.market_address())) {
    const Address caller = step.submitter == "op" ? op : alice;
    Status st = [&]() -> Status {
      const json& a = step.args;
      if (step.op == "mintDmd")
        return eco.mint_dmd(caller, *Address::from_hex(a["to"].get<std::string>()),
                            a["amount"].get<Amount>());
      if (step.op == "mintPet") {
        auto r = eco.mint_pet(caller, *Address::from_hex(a["to"].get<std::string>()),
                              a["bonusRatePct"].get<std::uint32_t>());
        return r ? Status{} : Status{r.error()};
      }
      if (step.op == "transfer")
        return eco.transfer(caller, *Address::from_hex(a["to"].get<std::string>()),
                            a["amount"].get<Amount>());
      if (step.op == "approve")
        return eco.approve(caller, *Address::from_hex(a["spender"].get<std::string>()),
                           a["amount"].get<Amount>());
      if (step.op == "transferFrom")
        return eco.transfer_from(caller, *Address::from_hex(a["owner"].get<std::string>()),
                                 *Address::from_hex(a["to"].get<std::string>()),
                                 a["amount"].get<Amount>());
      if (step.op == "buyDmd") {
        auto r = eco.buy_dmd(native, caller, step.value);
        return r ? Status{} : Status{r.error()};
      }
      if (step.op == "approveNft")
        return eco.approve_nft(caller, a["tokenId"].get<TokenId>(),
                               *Address::from_hex(a["spender"].get<std::string>()));
      if (step.op == "listNft")
        return eco.list_nft(caller, a["tokenId"].get<TokenId>(), a["priceDmd"].get<Amount>());
      if (step.op == "cancelListing") return eco.cancel_listing(caller, a["tokenId"].get<TokenId>());
      if (step.op == "buyNft") return eco.buy_nft(caller, a["tokenId"].get<TokenId>());
      if (step.op == "transferNft")
        return eco.transfer_nft(caller, *Address::from_hex(a["from"].get<std::string>()),
                                *Address::from_hex(a["to"].get<std::string>()),
                                a["tokenId"].get<TokenId>());
      if (step.op == "grantReward") {
        auto rec = record_from_json(a["record"]);
        REQUIRE(rec);
        auto r = eco.grant_reward(*Address::from_hex(a["user"].get<std::string>()),
                                  a["petTokenId"].get<TokenId>(), *rec);
        return r ? Status{} : Status{r.error()};
      }
      return Error{Err::BadRequest, "unmapped step " + step.op};
    }();
    const Gas gas = *costs.cost_of(step.op);
    const std::string reason = st ? "" : std::string(err_name(st.code()));
    char line[160];
    std::snprintf(line, sizeof line, "%s|%d|%s|%llu|%.6f\n", step.op.c_str(), st ? 1 : 0,
                  reason.c_str(), static_cast<unsigned long long>(gas),
                  fee_gwei(gas, cfg.gasPriceGwei));
    direct += line;
  }
  (void)eco.drain_events();

  CHECK(direct == viaSim.summary);
  CHECK(digest_hex(eco.state_digest()) == viaSim.digest);
  CHECK(eco.balance_of(op) == viaSim.balOp);
  CHECK(eco.balance_of(alice) == viaSim.balAlice);
  CHECK(eco.balance_of(bob) == viaSim.balBob);
}
