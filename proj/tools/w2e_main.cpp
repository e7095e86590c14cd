// w2e: workout-to-earn token economy workbench.
//
// Subcommands: wallet new, net list, deploy, bench <grid>, market
// list|buy|cancel, workout simulate, report render. Logs go to stderr, data
// to stdout and files under the output directory. Exit codes: 0 success,
// 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "w2e/bench.hpp"
#include "w2e/crypto.hpp"
#include "w2e/gateway.hpp"
#include "w2e/indexer.hpp"
#include "w2e/token.hpp"
#include "w2e/wallet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace w2e;

namespace {

void logi(const std::string& msg) { std::fprintf(stderr, "[w2e] %s\n", msg.c_str()); }
void loge(const std::string& msg) { std::fprintf(stderr, "[w2e] error: %s\n", msg.c_str()); }

struct RunConfig {
  std::string profileFile;
  std::string artifactDir;
  std::string outputDir = "out";
  std::uint32_t trials = 5;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

std::string data_dir() {
  if (const char* d = std::getenv("W2E_DATA_DIR"); d != nullptr && *d != '\0') return d;
#ifdef W2E_DEFAULT_DATA_DIR
  return W2E_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

Result<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Err::IoError, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Status spill(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return Error{Err::IoError, "cannot write " + path};
  out << text;
  out.flush();
  if (!out) return Error{Err::IoError, "write failed for " + path};
  return {};
}

// ---- artifacts ----

int standard_rank(std::string_view standard) {
  if (standard == "ERC20") return 0;
  if (standard == "ERC721") return 1;
  if (standard == "ERC1155") return 2;
  if (standard == "ERC777") return 3;
  return 4;
}

Result<std::vector<ContractArtifact>> load_artifacts(const std::string& dir) {
  std::vector<ContractArtifact> out;
  std::error_code ec;
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  if (ec) return Error{Err::IoError, "cannot list artifact dir " + dir + ": " + ec.message()};
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    auto a = ContractArtifact::load_file(p);
    if (!a) return a.error();
    out.push_back(std::move(*a));
  }
  if (out.empty()) return Error{Err::BadArtifact, "no artifacts in " + dir};
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return standard_rank(a.standard) < standard_rank(b.standard);
  });
  return out;
}

Result<ContractArtifact> resolve_artifact(const RunConfig& cfg, const std::string& ref) {
  if (fs::exists(ref)) return ContractArtifact::load_file(ref);
  const std::string inDir = cfg.artifactDir + "/" + ref + ".json";
  if (fs::exists(inDir)) return ContractArtifact::load_file(inDir);
  return Error{Err::BadArtifact, "artifact not found: " + ref};
}

// ---- market / workout session ----
//
// The market and workout commands run against a local token economy persisted
// under the output directory, with each command batch stamped as one
// pseudo-block so the journal is indexable like chain output. Demo accounts
// operator/alice/bob are provisioned on first use.

class Session {
 public:
  static constexpr const char* kStateFile = "market_session.json";
  static constexpr const char* kJournalFile = "market_journal.jsonl";

  static Result<Session> open(const std::string& outputDir) {
    Session s;
    s.dir_ = outputDir;
    std::error_code ec;
    fs::create_directories(outputDir, ec);
    if (ec) return Error{Err::IoError, "cannot create " + outputDir + ": " + ec.message()};
    const std::string statePath = s.state_path();
    if (fs::exists(statePath)) {
      auto text = slurp(statePath);
      if (!text) return text.error();
      json j = json::parse(*text, nullptr, false);
      if (j.is_discarded())
        return Error{Err::CorruptSnapshot, "session state is not valid JSON: " + statePath};
      if (j.value("schema", 0) != 1)
        return Error{Err::SchemaMismatch, "session state schema mismatch: " + statePath};
      auto eco = TokenEconomy::from_json(j.at("economy"));
      if (!eco) return eco.error();
      auto native = MapNativeLedger::from_json(j.at("native"));
      if (!native) return native.error();
      s.eco_ = std::make_unique<TokenEconomy>(std::move(*eco));
      s.native_ = std::move(*native);
      s.pseudoBlock_ = j.value("pseudoBlock", std::uint64_t{0});
      s.nextSeq_ = j.value("nextSeq", std::uint64_t{0});
      return s;
    }
    // first run: provision the demo world
    s.eco_ = std::make_unique<TokenEconomy>(s.addr("operator"));
    s.native_.credit(s.addr("alice"), 1'000'000'000'000'000'000ull);
    s.native_.credit(s.addr("bob"), 1'000'000'000'000'000'000ull);
    auto st = s.bootstrap();
    if (!st) return st.error();
    logi("initialized demo market session (accounts: operator, alice, bob)");
    return s;
  }

  Address addr(std::string_view alias) const {
    return address_from_label("w2e/session/" + std::string(alias));
  }

  Result<Address> resolve(const std::string& who) const {
    for (const char* alias : {"operator", "alice", "bob"})
      if (who == alias) return addr(alias);
    if (auto a = Address::from_hex(who.starts_with("0x") ? who.substr(2) : who)) return *a;
    return Error{Err::BadRequest, "unknown account (use operator/alice/bob or hex): " + who};
  }

  std::string alias_of(const Address& a) const {
    for (const char* alias : {"operator", "alice", "bob"})
      if (addr(alias) == a) return alias;
    return a.hex();
  }

  TokenEconomy& economy() { return *eco_; }

  /// Runs one operation batch, stamps its events as the next pseudo-block,
  /// appends them to the journal, and persists the session.
  Status commit(std::string_view label, const std::function<Status()>& fn) {
    auto st = fn();
    if (!st) {
      // failed operations emit nothing; drop any stale drain just in case
      (void)eco_->drain_events();
      return st;
    }
    const BlockNumber block = ++pseudoBlock_;
    const auto digest = sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    Hash32 txHash;
    std::copy(digest.begin(), digest.end(), txHash.bytes.begin());
    // fold the block number into the hash so repeated labels stay distinct
    for (int i = 0; i < 8; ++i)
      txHash.bytes[static_cast<std::size_t>(i)] ^=
          static_cast<std::uint8_t>(block >> (8 * i));
    std::uint32_t idx = 0;
    std::vector<StampedEvent> batch;
    for (Event& e : eco_->drain_events()) {
      StampedEvent se;
      se.seq = nextSeq_++;
      se.block = block;
      se.indexInBlock = idx++;
      se.txHash = txHash;
      se.contract = addr("market-contract");
      se.body = std::move(e);
      batch.push_back(std::move(se));
    }
    if (auto js = append_journal(journal_path(), batch); !js) return js;
    return save();
  }

  Status save() const {
    json j{{"schema", 1},
           {"pseudoBlock", pseudoBlock_},
           {"nextSeq", nextSeq_},
           {"economy", eco_->to_json()},
           {"native", native_.to_json()}};
    return spill(state_path(), j.dump() + "\n");
  }

  void print_summary() const {
    std::printf("account    dmd      pets\n");
    for (const char* alias : {"operator", "alice", "bob"}) {
      const Address a = addr(alias);
      std::string pets;
      for (TokenId id : eco_->pets_of(a)) {
        if (!pets.empty()) pets += ",";
        pets += std::to_string(id);
      }
      std::printf("%-10s %-8llu %s\n", alias,
                  static_cast<unsigned long long>(eco_->balance_of(a)),
                  pets.empty() ? "-" : pets.c_str());
    }
    bool any = false;
    for (TokenId id = 1; id <= eco_->minted_pets(); ++id) {
      if (auto l = eco_->active_listing(id)) {
        if (!any) std::printf("listings:\n");
        any = true;
        std::printf("  pet %llu by %s at %llu DMD\n", static_cast<unsigned long long>(id),
                    alias_of(l->seller).c_str(),
                    static_cast<unsigned long long>(l->priceDmd));
      }
    }
    if (!any) std::printf("listings: none\n");
  }

  std::string state_path() const { return dir_ + "/" + kStateFile; }
  std::string journal_path() const { return dir_ + "/" + kJournalFile; }

 private:
  Status bootstrap() {
    const Address op = addr("operator");
    const Address alice = addr("alice");
    const Address bob = addr("bob");
    auto step = [&](std::string_view label, auto&& fn) {
      return commit(label, [&]() -> Status { return fn(); });
    };
    if (auto st = step("bootstrap/mint-alice",
                       [&] { return eco_->mint_dmd(op, alice, 10'000); });
        !st)
      return st;
    if (auto st = step("bootstrap/mint-bob", [&] { return eco_->mint_dmd(op, bob, 10'000); });
        !st)
      return st;
    if (auto st = step("bootstrap/pet-alice",
                       [&]() -> Status {
                         auto id = eco_->mint_pet(op, alice, 120);
                         if (!id) return id.error();
                         return {};
                       });
        !st)
      return st;
    if (auto st = step("bootstrap/pet-bob",
                       [&]() -> Status {
                         auto id = eco_->mint_pet(op, bob, 140);
                         if (!id) return id.error();
                         return {};
                       });
        !st)
      return st;
    if (auto st = step("bootstrap/approve-alice",
                       [&] { return eco_->approve_nft(alice, 1, eco_->market_address()); });
        !st)
      return st;
    if (auto st =
            step("bootstrap/list-alice", [&] { return eco_->list_nft(alice, 1, 500); });
        !st)
      return st;
    return {};
  }

  std::string dir_;
  std::unique_ptr<TokenEconomy> eco_;
  MapNativeLedger native_;
  std::uint64_t pseudoBlock_ = 0;
  std::uint64_t nextSeq_ = 0;
};

// ---- command bodies (return process exit codes) ----

int cmd_wallet_new(const RunConfig& cfg, int words, const std::string& passphrase,
                   bool showSeed, bool seeded) {
  const std::size_t entropyBytes = words == 24 ? 32 : 16;
  std::vector<std::uint8_t> entropy(entropyBytes);
  if (seeded) {
    DetRng rng(mix_seed(cfg.seed, "wallet"));
    for (auto& b : entropy) b = static_cast<std::uint8_t>(rng.uniform_u64(0, 255));
  } else {
    std::random_device rd;
    for (auto& b : entropy) b = static_cast<std::uint8_t>(rd() & 0xff);
  }
  auto wl = Wordlist::load_file(data_dir() + "/bip39_english.txt");
  if (!wl) {
    loge(wl.error().to_string());
    return 1;
  }
  auto mnemonic = generate_mnemonic(entropy, *wl);
  if (!mnemonic) {
    loge(mnemonic.error().to_string());
    return 1;
  }
  auto seed = mnemonic_to_seed(mnemonic->words, *wl, passphrase);
  if (!seed) {
    loge(seed.error().to_string());
    return 1;
  }
  const DerivedAccount account = derive_account(*seed, 0);
  std::printf("mnemonic: %s\n", mnemonic->phrase().c_str());
  std::printf("address:  %s\n", account.address.hex().c_str());
  if (showSeed)
    std::printf("seed:     %s\n",
                to_hex(std::span<const std::uint8_t>(seed->data(), seed->size())).c_str());
  return 0;
}

int cmd_net_list(const RunConfig& cfg) {
  auto reg = ProfileRegistry::load_file(cfg.profileFile);
  if (!reg) {
    loge(reg.error().to_string());
    return 1;
  }
  std::printf("%-20s %-5s %-10s %-12s %-14s\n", "network", "kind", "chain-id",
              "interval-ms", "price-gwei");
  for (const auto& p : reg->profiles()) {
    std::printf("%-20s %-5s %-10llu %-12lld %-14.8g\n", p.name.c_str(), p.kind.c_str(),
                static_cast<unsigned long long>(p.chainId),
                static_cast<long long>(p.sim.blockIntervalMs), p.sim.gasPriceGwei);
  }
  return 0;
}

int cmd_deploy(const RunConfig& cfg, const std::string& network, const std::string& artifactRef) {
  auto reg = ProfileRegistry::load_file(cfg.profileFile);
  if (!reg) {
    loge(reg.error().to_string());
    return 1;
  }
  const NetworkProfile* profile = reg->by_name(network);
  if (profile == nullptr) {
    loge("unknown network: " + network);
    return 1;
  }
  auto artifact = resolve_artifact(cfg, artifactRef);
  if (!artifact) {
    loge(artifact.error().to_string());
    return 1;
  }
  NetworkProfile lane = *profile;
  if (lane.kind == "sim") lane.sim.rngSeed = mix_seed(cfg.seed, lane.name);
  auto backend = make_backend(lane);
  if (!backend) {
    loge(backend.error().to_string());
    return 1;
  }
  const Address deployer = address_from_label("w2e/cli/deployer");
  if (auto* simBackend = dynamic_cast<SimBackend*>(backend->get()))
    simBackend->sim().faucet(deployer, 2'000'000'000'000'000'000ull);
  Gateway gw(lane, *backend, std::make_unique<JsonBlobSigner>(deployer));
  if (auto st = gw.verify_connection(); !st) {
    loge(st.error().to_string());
    return 1;
  }
  json args = json::object();
  if (artifact->standard == "ERC20") args["rateDmdPerNative"] = 1000;
  logi("deploying " + artifact->name + " to " + lane.name);
  auto r = gw.deploy(*artifact, args);
  if (!r) {
    loge(r.error().to_string());
    return 1;
  }
  json out{{"network", lane.name},
           {"artifact", artifact->name},
           {"address", r->address.hex()},
           {"receipt", r->receipt.to_json()}};
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

int cmd_bench(const RunConfig& cfg, BenchKind kind, const std::string& comparePath) {
  auto reg = ProfileRegistry::load_file(cfg.profileFile);
  if (!reg) {
    loge(reg.error().to_string());
    return 1;
  }
  auto artifacts = load_artifacts(cfg.artifactDir);
  if (!artifacts) {
    loge(artifacts.error().to_string());
    return 1;
  }
  std::optional<ReferenceTables> refs;
  if (!comparePath.empty()) {
    auto r = ReferenceTables::load_file(comparePath);
    if (!r) {
      loge(r.error().to_string());
      return 1;
    }
    refs = std::move(*r);
  }
  std::error_code ec;
  fs::create_directories(cfg.outputDir, ec);
  if (ec) {
    loge("cannot create " + cfg.outputDir + ": " + ec.message());
    return 1;
  }
  BenchOptions options;
  options.seed = cfg.seed;
  options.trials = cfg.trials;
  logi(std::string("running ") + std::string(bench_kind_name(kind)) + " across " +
       std::to_string(reg->profiles().size()) + " networks (seed " +
       std::to_string(cfg.seed) + ", trials " + std::to_string(cfg.trials) + ")");
  BenchRunner runner(std::move(*reg), std::move(*artifacts), options);
  auto report = runner.run(kind);
  if (!report) {
    loge(report.error().to_string());
    return 1;
  }
  auto rendered = render(*report, cfg.format, refs ? &*refs : nullptr);
  if (!rendered) {
    loge(rendered.error().to_string());
    return 1;
  }
  const std::string base = cfg.outputDir + "/" + std::string(bench_kind_name(kind));
  const std::string ext = cfg.format == "markdown" ? ".md" : ".csv";
  if (auto st = spill(base + ".json", report->to_json().dump(2) + "\n"); !st) {
    loge(st.error().to_string());
    return 1;
  }
  if (auto st = spill(base + ext, *rendered); !st) {
    loge(st.error().to_string());
    return 1;
  }
  std::fputs(rendered->c_str(), stdout);
  logi("wrote " + base + ".json and " + base + ext);
  if (!report->complete()) {
    for (std::size_t r = 0; r < report->rows.size(); ++r)
      for (std::size_t c = 0; c < report->cols.size(); ++c)
        if (!report->cells[r][c].ok())
          loge(report->rows[r] + " / " + report->cols[c] + ": " +
               report->cells[r][c].error);
    return 1;
  }
  return 0;
}

int cmd_market(const RunConfig& cfg, const std::string& verb, const std::string& who,
               TokenId tokenId, Amount price) {
  auto session = Session::open(cfg.outputDir);
  if (!session) {
    loge(session.error().to_string());
    return 1;
  }
  auto actor = session->resolve(who);
  if (!actor) {
    loge(actor.error().to_string());
    return 1;
  }
  TokenEconomy& eco = session->economy();
  Status st;
  if (verb == "list") {
    st = session->commit("market/list", [&]() -> Status {
      if (auto owner = eco.owner_of(tokenId); owner && *owner == *actor &&
                                              eco.approved_for(tokenId) !=
                                                  std::optional<Address>(eco.market_address())) {
        // approve-then-list is the standard flow; fold the approval in
        if (auto ap = eco.approve_nft(*actor, tokenId, eco.market_address()); !ap) return ap;
        logi("approved marketplace for pet " + std::to_string(tokenId));
      }
      return eco.list_nft(*actor, tokenId, price);
    });
  } else if (verb == "buy") {
    st = session->commit("market/buy", [&] { return eco.buy_nft(*actor, tokenId); });
  } else if (verb == "cancel") {
    st = session->commit("market/cancel",
                         [&] { return eco.cancel_listing(*actor, tokenId); });
  } else {
    loge("unknown market verb: " + verb);
    return 2;
  }
  if (!st) {
    loge("market " + verb + " failed: " + st.error().to_string());
    return 1;
  }
  logi("market " + verb + " ok (pet " + std::to_string(tokenId) + ", " +
       session->alias_of(*actor) + ")");
  session->print_summary();
  return 0;
}

int cmd_workout(const RunConfig& cfg, const std::string& file) {
  auto session = Session::open(cfg.outputDir);
  if (!session) {
    loge(session.error().to_string());
    return 1;
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    loge("cannot open " + file);
    return 1;
  }
  TokenEconomy& eco = session->economy();
  std::string line;
  std::size_t lineNo = 0, granted = 0, rejected = 0;
  Amount total = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      loge(file + ":" + std::to_string(lineNo) + ": not valid JSON");
      return 1;
    }
    auto user = session->resolve(j.value("user", ""));
    if (!user) {
      loge(file + ":" + std::to_string(lineNo) + ": " + user.error().to_string());
      return 1;
    }
    auto record = record_from_json(j);
    if (!record) {
      loge(file + ":" + std::to_string(lineNo) + ": " + record.error().to_string());
      return 1;
    }
    const auto pets = eco.pets_of(*user);
    if (pets.empty()) {
      std::printf("line %zu: %s rejected (%s)\n", lineNo,
                  session->alias_of(*user).c_str(), err_name(Err::NotEarnable).data());
      ++rejected;
      continue;
    }
    Result<RewardGrant> grant = Error{Err::BadRequest, "not attempted"};
    auto st = session->commit("workout/grant", [&]() -> Status {
      grant = eco.grant_reward(*user, pets.front(), *record);
      if (!grant) return grant.error();
      return {};
    });
    if (st) {
      std::printf("line %zu: %s earned %llu DMD (pet %llu: base %llu x %u%%)\n", lineNo,
                  session->alias_of(*user).c_str(),
                  static_cast<unsigned long long>(grant->totalDmd),
                  static_cast<unsigned long long>(grant->petTokenId),
                  static_cast<unsigned long long>(grant->baseDmd), grant->bonusRatePct);
      ++granted;
      total += grant->totalDmd;
    } else {
      std::printf("line %zu: %s rejected (%s)\n", lineNo,
                  session->alias_of(*user).c_str(), err_name(st.error().code).data());
      ++rejected;
    }
  }
  std::printf("workouts: %zu granted, %zu rejected, %llu DMD minted\n", granted, rejected,
              static_cast<unsigned long long>(total));
  session->print_summary();
  return 0;
}

int cmd_report_render(const RunConfig& cfg, const std::string& input,
                      const std::string& comparePath, const std::string& outPath) {
  auto text = slurp(input);
  if (!text) {
    loge(text.error().to_string());
    return 1;
  }
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded()) {
    loge("report is not valid JSON: " + input);
    return 1;
  }
  auto report = BenchReport::from_json(j);
  if (!report) {
    loge(report.error().to_string());
    return 1;
  }
  std::optional<ReferenceTables> refs;
  if (!comparePath.empty()) {
    auto r = ReferenceTables::load_file(comparePath);
    if (!r) {
      loge(r.error().to_string());
      return 1;
    }
    refs = std::move(*r);
  }
  auto rendered = render(*report, cfg.format, refs ? &*refs : nullptr);
  if (!rendered) {
    loge(rendered.error().to_string());
    return 1;
  }
  if (!outPath.empty()) {
    if (auto st = spill(outPath, *rendered); !st) {
      loge(st.error().to_string());
      return 1;
    }
    logi("wrote " + outPath);
  }
  std::fputs(rendered->c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"w2e: workout-to-earn token economy workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  cfg.profileFile = data_dir() + "/profiles.json";
  cfg.artifactDir = data_dir() + "/artifacts";
  std::string configPath;

  app.add_option("--config", configPath, "JSON run configuration file");
  auto* optProfiles =
      app.add_option("--profiles", cfg.profileFile, "network profile file");
  auto* optArtifacts =
      app.add_option("--artifacts-dir", cfg.artifactDir, "contract artifact directory");
  auto* optOut = app.add_option("--out-dir", cfg.outputDir, "output directory");
  auto* optTrials =
      app.add_option("--trials", cfg.trials, "trials per time benchmark")->check(
          CLI::PositiveNumber);
  auto* optSeed = app.add_option("--seed", cfg.seed, "base RNG seed");
  auto* optFormat = app.add_option("--format", cfg.format, "render format")
                        ->check(CLI::IsMember({"csv", "markdown"}));

  // wallet
  auto* wallet = app.add_subcommand("wallet", "mnemonic wallets");
  auto* walletNew = wallet->add_subcommand("new", "generate a mnemonic and address");
  int words = 12;
  std::string passphrase;
  bool showSeed = false;
  walletNew->add_option("--words", words, "phrase length")->check(CLI::IsMember({12, 24}));
  walletNew->add_option("--passphrase", passphrase, "BIP39 passphrase");
  walletNew->add_flag("--show-seed", showSeed, "also print the 64-byte seed");

  // net
  auto* net = app.add_subcommand("net", "network profiles");
  auto* netList = net->add_subcommand("list", "list configured networks");

  // deploy
  auto* deploy = app.add_subcommand("deploy", "deploy an artifact");
  std::string network, artifactRef;
  deploy->add_option("--network", network, "network profile name")->required();
  deploy->add_option("--artifact", artifactRef, "artifact name or path")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark grids");
  std::string benchCompare;
  bench->add_option("--compare", benchCompare, "reference tables to diff against");
  CLI::App* benchSubs[4];
  const char* benchNames[4] = {"deploy-gas", "exec-gas", "deploy-time", "exec-time"};
  const char* benchDescs[4] = {"deployment fees per artifact", "buy/sell/cancel fees",
                               "deployment confirmation latency", "buy confirmation latency"};
  for (int i = 0; i < 4; ++i) benchSubs[i] = bench->add_subcommand(benchNames[i], benchDescs[i]);
  bench->require_subcommand(1);

  // market
  auto* market = app.add_subcommand("market", "local marketplace session");
  std::string marketAs;
  TokenId marketToken = 0;
  Amount marketPrice = 0;
  auto* marketList = market->add_subcommand("list", "list a pet for sale");
  auto* marketBuy = market->add_subcommand("buy", "buy a listed pet");
  auto* marketCancel = market->add_subcommand("cancel", "cancel a listing");
  for (CLI::App* sub : {marketList, marketBuy, marketCancel}) {
    sub->add_option("--as", marketAs, "acting account (operator/alice/bob or hex)")
        ->required();
    sub->add_option("--token", marketToken, "pet token id")->required();
  }
  marketList->add_option("--price", marketPrice, "price in DMD")->required();
  market->require_subcommand(1);

  // workout
  auto* workout = app.add_subcommand("workout", "workout rewards");
  auto* workoutSim = workout->add_subcommand("simulate", "feed workout records");
  std::string workoutFile;
  workoutSim->add_option("--file", workoutFile, "JSONL workout records")->required();

  // report
  auto* report = app.add_subcommand("report", "report tooling");
  auto* reportRender = report->add_subcommand("render", "render a report file");
  std::string reportInput, reportCompare, reportOut;
  reportRender->add_option("--input", reportInput, "report JSON file")->required();
  reportRender->add_option("--compare", reportCompare, "reference tables to diff against");
  reportRender->add_option("--out", reportOut, "also write rendered output here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // config file fills whatever the command line left untouched
  if (!configPath.empty()) {
    auto text = slurp(configPath);
    if (!text) {
      loge(text.error().to_string());
      return 1;
    }
    json j = json::parse(*text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      loge("config is not a JSON object: " + configPath);
      return 1;
    }
    try {
      if (optProfiles->count() == 0 && j.contains("profileFilePath"))
        cfg.profileFile = j["profileFilePath"].get<std::string>();
      if (optArtifacts->count() == 0 && j.contains("artifactDirPath"))
        cfg.artifactDir = j["artifactDirPath"].get<std::string>();
      if (optOut->count() == 0 && j.contains("outputDirPath"))
        cfg.outputDir = j["outputDirPath"].get<std::string>();
      if (optTrials->count() == 0 && j.contains("trials"))
        cfg.trials = j["trials"].get<std::uint32_t>();
      if (optSeed->count() == 0 && j.contains("seed"))
        cfg.seed = j["seed"].get<std::uint64_t>();
      if (optFormat->count() == 0 && j.contains("format"))
        cfg.format = j["format"].get<std::string>();
    } catch (const json::exception& e) {
      loge(std::string("config field error: ") + e.what());
      return 1;
    }
    if (cfg.trials < 1) {
      loge("trials must be at least 1");
      return 2;
    }
    if (cfg.format != "csv" && cfg.format != "markdown") {
      loge("format must be csv or markdown");
      return 2;
    }
  }

  if (walletNew->parsed())
    return cmd_wallet_new(cfg, words, passphrase, showSeed, optSeed->count() > 0);
  if (netList->parsed()) return cmd_net_list(cfg);
  if (deploy->parsed()) return cmd_deploy(cfg, network, artifactRef);
  if (bench->parsed())
    for (int i = 0; i < 4; ++i)
      if (benchSubs[i]->parsed())
        return cmd_bench(cfg, *bench_kind_from(benchNames[i]), benchCompare);
  if (marketList->parsed()) return cmd_market(cfg, "list", marketAs, marketToken, marketPrice);
  if (marketBuy->parsed()) return cmd_market(cfg, "buy", marketAs, marketToken, 0);
  if (marketCancel->parsed()) return cmd_market(cfg, "cancel", marketAs, marketToken, 0);
  if (workoutSim->parsed()) return cmd_workout(cfg, workoutFile);
  if (reportRender->parsed())
    return cmd_report_render(cfg, reportInput, reportCompare, reportOut);

  loge("no command selected");
  return 2;
}
