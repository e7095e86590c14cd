#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "w2e/common.hpp"
#include "w2e/gateway.hpp"

namespace w2e {

enum class BenchKind { DeployGas, ExecGas, DeployTime, ExecTime };

std::string_view bench_kind_name(BenchKind k);  // "deploy-gas", "exec-gas", ...
std::optional<BenchKind> bench_kind_from(std::string_view name);

/// One (network, column) measurement. Gas benchmarks report the fee in Gwei
/// (the published unit) and carry gasUsed and the gas price alongside; time
/// benchmarks report confirmation latency in ms.
struct BenchCell {
  double value = 0.0;
  Gas gasUsed = 0;
  double priceGwei = 0.0;
  std::string error;  // nonempty when the measurement failed

  bool ok() const { return error.empty(); }
};

struct BenchReport {
  BenchKind kind = BenchKind::DeployGas;
  std::vector<std::string> rows;  // network names, registry order
  std::vector<std::string> cols;
  std::vector<std::vector<BenchCell>> cells;  // [row][col]
  std::uint64_t seed = 0;
  std::uint32_t trials = 0;
  std::string profilesHash;

  bool complete() const;
  /// Means per row; time benchmarks only. Fails on a row with failed cells.
  Result<std::vector<double>> row_means() const;

  nlohmann::json to_json() const;
  static Result<BenchReport> from_json(const nlohmann::json& j);
};

/// Arithmetic mean, the Average column of the time tables.
Result<double> mean(std::span<const double> samples);

/// "1st", "2nd", "3rd", ... trial column labels.
std::string ordinal_label(std::uint32_t n);

/// Reference grids the rendered reports can be compared against.
class ReferenceTables {
 public:
  struct Table {
    std::vector<std::string> columns;
    std::vector<std::string> networks;
    std::map<std::string, std::vector<double>> values;  // by network
    std::map<std::string, double> averages;             // time tables only
  };

  static Result<ReferenceTables> load_file(const std::string& path);
  static Result<ReferenceTables> from_json(const nlohmann::json& j);
  const Table* table_for(BenchKind kind) const;

 private:
  std::map<int, Table> tables_;
};

/// Renders a report as "csv" or "markdown". Failed cells render as an em
/// dash. With `compare`, fee tables gain a per-column delta against the
/// reference and time tables a delta on the Average column. Output contains
/// no timestamps or environment details, so equal inputs render equal bytes.
Result<std::string> render(const BenchReport& report, std::string_view format,
                           const ReferenceTables* compare = nullptr);

struct BenchOptions {
  std::uint64_t seed = 0;
  std::uint32_t trials = 5;
  bool parallel = true;
};

/// Runs the four benchmark grids across every profile in the registry, one
/// lane per network. Lanes are independent: each derives its RNG seed from
/// (options.seed, profile name), so threading never changes results, and rows
/// always assemble in registry order.
class BenchRunner {
 public:
  BenchRunner(ProfileRegistry registry, std::vector<ContractArtifact> artifacts,
              BenchOptions options);

  Result<BenchReport> run(BenchKind kind);

 private:
  std::vector<BenchCell> run_lane(const NetworkProfile& profile, BenchKind kind,
                                  std::size_t columnCount) const;
  std::vector<BenchCell> lane_deploy_gas(Gateway& gw) const;
  const ContractArtifact* artifact_by_standard(std::string_view standard) const;

  ProfileRegistry registry_;
  std::vector<ContractArtifact> artifacts_;
  BenchOptions options_;
};

}  // namespace w2e
