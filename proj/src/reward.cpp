#include "w2e/reward.hpp"

#include <cmath>

namespace w2e {

Status validate_record(const WorkoutRecord& record, const RewardParams& params) {
  if (record.durationSec == 0) {
    return Error(Err::InconsistentRecord, "durationSec must be positive");
  }
  double km = static_cast<double>(record.distanceM) / 1000.0;
  double hours = static_cast<double>(record.durationSec) / 3600.0;
  double derived = km / hours;
  if (std::abs(derived - record.avgSpeedKmh) > params.speedToleranceKmh) {
    return Error(Err::InconsistentRecord,
                 "avgSpeedKmh disagrees with distance/duration");
  }
  return {};
}

Result<RewardAmounts> compute_reward(const WorkoutRecord& record, std::uint32_t bonusRatePct,
                                     const RewardParams& params) {
  if (bonusRatePct < 100) {
    return Error(Err::InvalidBonusRate, "bonus rate below 100%");
  }
  if (auto v = validate_record(record, params); !v) return v.error();
  if (record.avgSpeedKmh > params.maxAvgSpeedKmh) {
    return Error(Err::ImplausibleRecord, "average speed above plausibility cap");
  }
  // Integer floor throughout: meters * rate / 1000, then the bonus percentage.
  using u128 = unsigned __int128;
  u128 base = (u128)record.distanceM * params.baseRateDmdPerKm / 1000u;
  u128 total = base * bonusRatePct / 100u;
  RewardAmounts out;
  out.baseDmd = static_cast<Amount>(base);
  out.totalDmd = static_cast<Amount>(total);
  return out;
}

}  // namespace w2e
