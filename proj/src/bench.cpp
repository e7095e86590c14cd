#include "w2e/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace w2e {

using nlohmann::json;

namespace {

constexpr std::string_view kMissing = "—";  // em dash

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string display_standard(std::string_view standard) {
  if (standard == "ERC20") return "ERC-20";
  if (standard == "ERC721") return "ERC-721";
  if (standard == "ERC1155") return "ERC-1155";
  if (standard == "ERC777") return "ERC-777";
  return std::string(standard);
}

bool is_time_kind(BenchKind k) {
  return k == BenchKind::DeployTime || k == BenchKind::ExecTime;
}

}  // namespace

std::string_view bench_kind_name(BenchKind k) {
  switch (k) {
    case BenchKind::DeployGas: return "deploy-gas";
    case BenchKind::ExecGas: return "exec-gas";
    case BenchKind::DeployTime: return "deploy-time";
    case BenchKind::ExecTime: return "exec-time";
  }
  return "unknown";
}

std::optional<BenchKind> bench_kind_from(std::string_view name) {
  if (name == "deploy-gas") return BenchKind::DeployGas;
  if (name == "exec-gas") return BenchKind::ExecGas;
  if (name == "deploy-time") return BenchKind::DeployTime;
  if (name == "exec-time") return BenchKind::ExecTime;
  return std::nullopt;
}

Result<double> mean(std::span<const double> samples) {
  if (samples.empty()) return Error{Err::EmptySamples, "mean of zero samples"};
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

std::string ordinal_label(std::uint32_t n) {
  const std::uint32_t tens = n % 100;
  const std::uint32_t ones = n % 10;
  const char* suffix = "th";
  if (tens < 11 || tens > 13) {
    if (ones == 1) suffix = "st";
    else if (ones == 2) suffix = "nd";
    else if (ones == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

// ---- BenchReport ----

bool BenchReport::complete() const {
  if (cells.size() != rows.size()) return false;
  for (const auto& row : cells) {
    if (row.size() != cols.size()) return false;
    for (const auto& c : row)
      if (!c.ok()) return false;
  }
  return true;
}

Result<std::vector<double>> BenchReport::row_means() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::vector<double> values;
    values.reserve(cells[r].size());
    for (const auto& c : cells[r]) {
      if (!c.ok())
        return Error{Err::EmptySamples, rows[r] + " has a failed cell: " + c.error};
      values.push_back(c.value);
    }
    auto m = mean(values);
    if (!m) return m.error();
    out.push_back(*m);
  }
  return out;
}

json BenchReport::to_json() const {
  json cellRows = json::array();
  for (const auto& row : cells) {
    json cellRow = json::array();
    for (const auto& c : row) {
      json cj{{"value", c.value}, {"gasUsed", c.gasUsed}, {"priceGwei", c.priceGwei}};
      if (!c.error.empty()) cj["error"] = c.error;
      cellRow.push_back(std::move(cj));
    }
    cellRows.push_back(std::move(cellRow));
  }
  return json{{"kind", std::string(bench_kind_name(kind))},
              {"rows", rows},
              {"cols", cols},
              {"cells", std::move(cellRows)},
              {"seed", seed},
              {"trials", trials},
              {"profilesHash", profilesHash}};
}

Result<BenchReport> BenchReport::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadRequest, "report must be an object"};
  BenchReport r;
  auto kind = bench_kind_from(j.value("kind", ""));
  if (!kind) return Error{Err::BadRequest, "report kind unknown: " + j.value("kind", "")};
  r.kind = *kind;
  try {
    r.rows = j.at("rows").get<std::vector<std::string>>();
    r.cols = j.at("cols").get<std::vector<std::string>>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.trials = j.value("trials", std::uint32_t{0});
    r.profilesHash = j.value("profilesHash", "");
    for (const json& rowJ : j.at("cells")) {
      std::vector<BenchCell> row;
      for (const json& cj : rowJ) {
        BenchCell c;
        c.value = cj.value("value", 0.0);
        c.gasUsed = cj.value("gasUsed", Gas{0});
        c.priceGwei = cj.value("priceGwei", 0.0);
        c.error = cj.value("error", "");
        row.push_back(std::move(c));
      }
      r.cells.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    return Error{Err::BadRequest, std::string("report field error: ") + e.what()};
  }
  if (r.cells.size() != r.rows.size())
    return Error{Err::BadRequest, "report cell grid does not match rows"};
  for (const auto& row : r.cells)
    if (row.size() != r.cols.size())
      return Error{Err::BadRequest, "report cell grid does not match cols"};
  return r;
}

// ---- ReferenceTables ----

Result<ReferenceTables> ReferenceTables::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Err::IoError, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded())
    return Error{Err::BadRequest, "reference file is not valid JSON: " + path};
  return from_json(j);
}

Result<ReferenceTables> ReferenceTables::from_json(const json& j) {
  if (!j.is_object()) return Error{Err::BadRequest, "reference tables must be an object"};
  static constexpr std::pair<const char*, BenchKind> kKeys[] = {
      {"deployGas", BenchKind::DeployGas},
      {"execGas", BenchKind::ExecGas},
      {"deployTime", BenchKind::DeployTime},
      {"execTime", BenchKind::ExecTime},
  };
  ReferenceTables out;
  try {
    for (const auto& [key, kind] : kKeys) {
      if (!j.contains(key)) continue;
      const json& tj = j.at(key);
      Table t;
      t.columns = tj.at("columns").get<std::vector<std::string>>();
      for (const json& row : tj.at("rows")) {
        const std::string network = row.at("network").get<std::string>();
        t.networks.push_back(network);
        t.values[network] = row.at("values").get<std::vector<double>>();
        if (row.contains("average")) t.averages[network] = row.at("average").get<double>();
      }
      out.tables_[static_cast<int>(kind)] = std::move(t);
    }
  } catch (const json::exception& e) {
    return Error{Err::BadRequest, std::string("reference table field error: ") + e.what()};
  }
  if (out.tables_.empty()) return Error{Err::BadRequest, "reference file holds no tables"};
  return out;
}

const ReferenceTables::Table* ReferenceTables::table_for(BenchKind kind) const {
  auto it = tables_.find(static_cast<int>(kind));
  return it == tables_.end() ? nullptr : &it->second;
}

// ---- render ----

Result<std::string> render(const BenchReport& report, std::string_view format,
                           const ReferenceTables* compare) {
  const bool csv = format == "csv";
  if (!csv && format != "markdown")
    return Error{Err::UnknownFormat, "render format must be csv or markdown, got '" +
                                         std::string(format) + "'"};
  const bool timeTable = is_time_kind(report.kind);
  const ReferenceTables::Table* ref =
      compare != nullptr ? compare->table_for(report.kind) : nullptr;
  if (compare != nullptr && ref == nullptr)
    return Error{Err::BadRequest, std::string("reference tables lack a ") +
                                      std::string(bench_kind_name(report.kind)) + " grid"};

  // header
  std::vector<std::string> header{"Network"};
  for (const auto& c : report.cols) {
    header.push_back(c);
    if (!timeTable && ref != nullptr) header.push_back(c + " Δ%");
  }
  if (timeTable) {
    header.push_back("Average (ms)");
    if (ref != nullptr) header.push_back("Average Δ%");
  }

  auto refValue = [&](const std::string& network, const std::string& col)
      -> std::optional<double> {
    if (ref == nullptr) return std::nullopt;
    auto vit = ref->values.find(network);
    if (vit == ref->values.end()) return std::nullopt;
    auto cit = std::find(ref->columns.begin(), ref->columns.end(), col);
    if (cit == ref->columns.end()) return std::nullopt;
    const auto idx = static_cast<std::size_t>(cit - ref->columns.begin());
    if (idx >= vit->second.size()) return std::nullopt;
    return vit->second[idx];
  };
  auto delta = [&](double ours, std::optional<double> published) -> std::string {
    if (!published || *published == 0.0) return std::string(kMissing);
    return fmt("%+.1f", (ours - *published) / *published * 100.0);
  };

  std::vector<std::vector<std::string>> lines;
  lines.push_back(header);
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    std::vector<std::string> line{report.rows[r]};
    bool rowOk = true;
    for (std::size_t c = 0; c < report.cols.size(); ++c) {
      const BenchCell& cell = report.cells[r][c];
      if (!cell.ok()) {
        rowOk = false;
        line.push_back(std::string(kMissing));
        if (!timeTable && ref != nullptr) line.push_back(std::string(kMissing));
        continue;
      }
      line.push_back(fmt(timeTable ? "%.0f" : "%.2f", cell.value));
      if (!timeTable && ref != nullptr)
        line.push_back(delta(cell.value, refValue(report.rows[r], report.cols[c])));
    }
    if (timeTable) {
      if (rowOk) {
        std::vector<double> vals;
        for (const auto& cell : report.cells[r]) vals.push_back(cell.value);
        const double avg = *mean(vals);
        line.push_back(fmt("%.1f", avg));
        if (ref != nullptr) {
          auto ait = ref->averages.find(report.rows[r]);
          line.push_back(delta(avg, ait == ref->averages.end()
                                        ? std::optional<double>{}
                                        : std::optional<double>{ait->second}));
        }
      } else {
        line.push_back(std::string(kMissing));
        if (ref != nullptr) line.push_back(std::string(kMissing));
      }
    }
    lines.push_back(std::move(line));
  }

  std::string out;
  if (csv) {
    for (const auto& line : lines) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (i > 0) out += ',';
        // cells containing commas get quoted; none of ours need escapes beyond that
        if (line[i].find(',') != std::string::npos)
          out += '"' + line[i] + '"';
        else
          out += line[i];
      }
      out += '\n';
    }
  } else {
    for (std::size_t li = 0; li < lines.size(); ++li) {
      out += '|';
      for (const auto& cell : lines[li]) {
        out += ' ';
        out += cell;
        out += " |";
      }
      out += '\n';
      if (li == 0) {
        out += '|';
        for (std::size_t i = 0; i < lines[0].size(); ++i)
          out += i == 0 ? " --- |" : " ---: |";
        out += '\n';
      }
    }
  }
  return out;
}

// ---- BenchRunner ----

BenchRunner::BenchRunner(ProfileRegistry registry, std::vector<ContractArtifact> artifacts,
                         BenchOptions options)
    : registry_(std::move(registry)),
      artifacts_(std::move(artifacts)),
      options_(options) {}

const ContractArtifact* BenchRunner::artifact_by_standard(std::string_view standard) const {
  for (const auto& a : artifacts_)
    if (a.standard == standard) return &a;
  return nullptr;
}

namespace {

/// One network lane: a shared backend and a gateway per role.
struct Lane {
  NetworkProfile profile;
  std::shared_ptr<ChainBackend> backend;
  std::unique_ptr<Gateway> op;
  std::unique_ptr<Gateway> seller;
  std::unique_ptr<Gateway> buyer;
  double priceGwei = 0.0;

  static Result<Lane> open(const NetworkProfile& original, std::uint64_t seed) {
    Lane lane;
    lane.profile = original;
    if (lane.profile.kind == "sim") {
      lane.profile.sim.rngSeed = mix_seed(seed, lane.profile.name);
      // Coarser polling costs nothing on the virtual clock: latency comes from
      // receipt timestamps, and RNG draws happen at submission only.
      lane.profile.pollIntervalMs =
          std::max(lane.profile.pollIntervalMs, lane.profile.sim.blockIntervalMs / 2);
    }
    auto backend = make_backend(lane.profile);
    if (!backend) return backend.error();
    lane.backend = *backend;

    const std::string ns = "w2e/bench/" + lane.profile.slug() + "/";
    const Address opAddr = address_from_label(ns + "operator");
    const Address sellerAddr = address_from_label(ns + "seller");
    const Address buyerAddr = address_from_label(ns + "buyer");
    if (auto* simBackend = dynamic_cast<SimBackend*>(lane.backend.get())) {
      constexpr Wei kFunding = 2'000'000'000'000'000'000ull;  // 2 native coins
      simBackend->sim().faucet(opAddr, kFunding);
      simBackend->sim().faucet(sellerAddr, kFunding);
      simBackend->sim().faucet(buyerAddr, kFunding);
    }
    lane.op = std::make_unique<Gateway>(lane.profile, lane.backend,
                                        std::make_unique<JsonBlobSigner>(opAddr));
    lane.seller = std::make_unique<Gateway>(lane.profile, lane.backend,
                                            std::make_unique<JsonBlobSigner>(sellerAddr));
    lane.buyer = std::make_unique<Gateway>(lane.profile, lane.backend,
                                           std::make_unique<JsonBlobSigner>(buyerAddr));
    auto price = lane.backend->gas_price_gwei();
    if (!price) return price.error();
    lane.priceGwei = *price;
    return lane;
  }
};

BenchCell fee_cell(const Receipt& receipt, double priceGwei) {
  BenchCell c;
  c.value = receipt.feeGwei;
  c.gasUsed = receipt.gasUsed;
  c.priceGwei = priceGwei;
  return c;
}

BenchCell time_cell(const Receipt& receipt, double priceGwei) {
  BenchCell c;
  auto latency = confirmation_latency(receipt);
  if (!latency) {
    c.error = latency.error().to_string();
    return c;
  }
  c.value = static_cast<double>(*latency);
  c.gasUsed = receipt.gasUsed;
  c.priceGwei = priceGwei;
  return c;
}

BenchCell error_cell(const Error& e) {
  BenchCell c;
  c.error = e.to_string();
  return c;
}

/// Checks a state-changing call both confirmed and succeeded.
Result<Receipt> must_succeed(Result<Receipt> r, std::string_view what) {
  if (!r) return r;
  if (!r->success)
    return Error{Err::Reverted, std::string(what) + " reverted: " + r->revertReason};
  return r;
}

struct MarketFixture {
  Address dmd;
  Address pets;
};

Result<MarketFixture> deploy_market(Lane& lane, const ContractArtifact& erc20,
                                    const ContractArtifact& erc721) {
  auto dmd = lane.op->deploy(erc20, json{{"rateDmdPerNative", 1000}});
  if (!dmd) return dmd.error();
  auto pets = lane.op->deploy(erc721, json{{"dmd", dmd->address.hex()}});
  if (!pets) return pets.error();
  return MarketFixture{dmd->address, pets->address};
}

}  // namespace

std::vector<BenchCell> BenchRunner::lane_deploy_gas(Gateway& gw) const {
  std::vector<BenchCell> out;
  auto price = gw.backend().gas_price_gwei();
  const double priceGwei = price ? *price : 0.0;
  for (const auto& artifact : artifacts_) {
    json args = json::object();
    if (artifact.standard == "ERC20") args["rateDmdPerNative"] = 1000;
    // The ERC-721 artifact deploys standalone here; each artifact is measured
    // in isolation.
    auto r = gw.deploy(artifact, args);
    if (!r) {
      out.push_back(error_cell(r.error()));
      continue;
    }
    out.push_back(fee_cell(r->receipt, priceGwei));
  }
  return out;
}

std::vector<BenchCell> BenchRunner::run_lane(const NetworkProfile& profile, BenchKind kind,
                                             std::size_t columnCount) const {
  auto fill_errors = [columnCount](const Error& e) {
    return std::vector<BenchCell>(columnCount, error_cell(e));
  };
  auto lane = Lane::open(profile, options_.seed);
  if (!lane) return fill_errors(lane.error());

  const ContractArtifact* erc20 = artifact_by_standard("ERC20");
  const ContractArtifact* erc721 = artifact_by_standard("ERC721");

  switch (kind) {
    case BenchKind::DeployGas:
      return lane_deploy_gas(*lane->op);

    case BenchKind::ExecGas: {
      if (erc20 == nullptr || erc721 == nullptr)
        return fill_errors(Error{Err::BadArtifact, "exec benchmark needs ERC20 and ERC721"});
      auto fixture = deploy_market(*lane, *erc20, *erc721);
      if (!fixture) return fill_errors(fixture.error());
      const Address seller = lane->seller->account();
      const Address buyer = lane->buyer->account();
      constexpr Amount kPrice = 500;

      auto setup = [&]() -> Status {
        auto r = must_succeed(
            lane->op->call(fixture->dmd, "mintDmd",
                           json{{"to", buyer.hex()}, {"amount", 100'000}}),
            "mintDmd");
        if (!r) return r.error();
        r = must_succeed(lane->op->call(fixture->pets, "mintPet",
                                        json{{"to", seller.hex()}, {"bonusRatePct", 120}}),
                         "mintPet");
        if (!r) return r.error();
        r = must_succeed(
            lane->seller->call(fixture->pets, "approveMarket", json{{"tokenId", 1}}),
            "approveMarket");
        if (!r) return r.error();
        r = must_succeed(lane->seller->call(fixture->pets, "listNft",
                                            json{{"tokenId", 1}, {"priceDmd", kPrice}}),
                         "listNft");
        if (!r) return r.error();
        // Second pet backs the measured list and cancel calls.
        r = must_succeed(lane->op->call(fixture->pets, "mintPet",
                                        json{{"to", seller.hex()}, {"bonusRatePct", 110}}),
                         "mintPet");
        if (!r) return r.error();
        r = must_succeed(
            lane->seller->call(fixture->pets, "approveMarket", json{{"tokenId", 2}}),
            "approveMarket");
        if (!r) return r.error();
        return {};
      };
      if (auto st = setup(); !st) return fill_errors(st.error());

      std::vector<BenchCell> out;
      auto buy = must_succeed(
          lane->buyer->call(fixture->pets, "buyNft", json{{"tokenId", 1}}), "buyNft");
      out.push_back(buy ? fee_cell(*buy, lane->priceGwei) : error_cell(buy.error()));
      auto sell = must_succeed(lane->seller->call(fixture->pets, "listNft",
                                                  json{{"tokenId", 2}, {"priceDmd", kPrice}}),
                               "listNft");
      out.push_back(sell ? fee_cell(*sell, lane->priceGwei) : error_cell(sell.error()));
      auto cancel = must_succeed(
          lane->seller->call(fixture->pets, "cancelListing", json{{"tokenId", 2}}),
          "cancelListing");
      out.push_back(cancel ? fee_cell(*cancel, lane->priceGwei) : error_cell(cancel.error()));
      return out;
    }

    case BenchKind::DeployTime: {
      if (erc20 == nullptr)
        return fill_errors(Error{Err::BadArtifact, "deploy-time benchmark needs ERC20"});
      std::vector<BenchCell> out;
      for (std::uint32_t t = 0; t < options_.trials; ++t) {
        if (auto st = lane->op->align_to_next_block(); !st) {
          out.push_back(error_cell(st.error()));
          continue;
        }
        auto r = lane->op->deploy(*erc20, json{{"rateDmdPerNative", 1000}});
        out.push_back(r ? time_cell(r->receipt, lane->priceGwei) : error_cell(r.error()));
      }
      return out;
    }

    case BenchKind::ExecTime: {
      if (erc20 == nullptr || erc721 == nullptr)
        return fill_errors(Error{Err::BadArtifact, "exec benchmark needs ERC20 and ERC721"});
      auto fixture = deploy_market(*lane, *erc20, *erc721);
      if (!fixture) return fill_errors(fixture.error());
      const Address seller = lane->seller->account();
      const Address buyer = lane->buyer->account();
      constexpr Amount kPrice = 500;
      auto funding = must_succeed(
          lane->op->call(fixture->dmd, "mintDmd",
                         json{{"to", buyer.hex()},
                              {"amount", static_cast<Amount>(kPrice) * options_.trials}}),
          "mintDmd");
      if (!funding) return fill_errors(funding.error());

      std::vector<BenchCell> out;
      for (std::uint32_t t = 0; t < options_.trials; ++t) {
        const TokenId tokenId = t + 1;
        auto prep = [&]() -> Status {
          auto r = must_succeed(
              lane->op->call(fixture->pets, "mintPet",
                             json{{"to", seller.hex()}, {"bonusRatePct", 120}}),
              "mintPet");
          if (!r) return r.error();
          r = must_succeed(lane->seller->call(fixture->pets, "approveMarket",
                                              json{{"tokenId", tokenId}}),
                           "approveMarket");
          if (!r) return r.error();
          r = must_succeed(lane->seller->call(fixture->pets, "listNft",
                                              json{{"tokenId", tokenId},
                                                   {"priceDmd", kPrice}}),
                           "listNft");
          if (!r) return r.error();
          return {};
        };
        if (auto st = prep(); !st) {
          out.push_back(error_cell(st.error()));
          continue;
        }
        if (auto st = lane->buyer->align_to_next_block(); !st) {
          out.push_back(error_cell(st.error()));
          continue;
        }
        auto r = must_succeed(
            lane->buyer->call(fixture->pets, "buyNft", json{{"tokenId", tokenId}}),
            "buyNft");
        out.push_back(r ? time_cell(*r, lane->priceGwei) : error_cell(r.error()));
      }
      return out;
    }
  }
  return fill_errors(Error{Err::BadRequest, "unknown benchmark kind"});
}

Result<BenchReport> BenchRunner::run(BenchKind kind) {
  BenchReport report;
  report.kind = kind;
  report.seed = options_.seed;
  report.trials = is_time_kind(kind) ? options_.trials : 1;
  report.profilesHash = registry_.source_hash();

  switch (kind) {
    case BenchKind::DeployGas:
      if (artifacts_.empty())
        return Error{Err::BadArtifact, "deploy benchmark needs at least one artifact"};
      for (const auto& a : artifacts_) report.cols.push_back(display_standard(a.standard));
      break;
    case BenchKind::ExecGas:
      report.cols = {"Buy NFT", "Sell NFT", "Cancel NFT"};
      break;
    case BenchKind::DeployTime:
    case BenchKind::ExecTime:
      if (options_.trials == 0)
        return Error{Err::BadRequest, "time benchmark needs at least one trial"};
      for (std::uint32_t t = 1; t <= options_.trials; ++t)
        report.cols.push_back(ordinal_label(t));
      break;
  }

  const auto& profiles = registry_.profiles();
  for (const auto& p : profiles) report.rows.push_back(p.name);
  report.cells.assign(profiles.size(), {});

  if (options_.parallel && profiles.size() > 1) {
    std::vector<std::thread> lanes;
    lanes.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i)
      lanes.emplace_back([this, &profiles, &report, i, kind] {
        report.cells[i] = run_lane(profiles[i], kind, report.cols.size());
      });
    for (auto& t : lanes) t.join();
  } else {
    for (std::size_t i = 0; i < profiles.size(); ++i)
      report.cells[i] = run_lane(profiles[i], kind, report.cols.size());
  }
  return report;
}

}  // namespace w2e
