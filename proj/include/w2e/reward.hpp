#pragma once

#include <cstdint>

#include "w2e/common.hpp"

namespace w2e {

/// One finished training session as captured by the mobile client.
struct WorkoutRecord {
  std::uint64_t durationSec = 0;
  std::uint64_t distanceM = 0;
  double avgSpeedKmh = 0.0;
  std::uint64_t steps = 0;
  std::int64_t startedAt = 0;  // unix seconds

  auto operator<=>(const WorkoutRecord&) const = default;
};

struct RewardParams {
  Amount baseRateDmdPerKm = 10;
  double maxAvgSpeedKmh = 30.0;       // plausibility cap for a running app
  double speedToleranceKmh = 0.5;     // internal consistency gate
};

struct RewardAmounts {
  Amount baseDmd = 0;
  Amount totalDmd = 0;
};

/// Reward issued for one workout; what the Rewarded event and the reward
/// history views carry.
struct RewardGrant {
  Address user;
  TokenId petTokenId = 0;
  Amount baseDmd = 0;
  std::uint32_t bonusRatePct = 100;
  Amount totalDmd = 0;
  WorkoutRecord record;

  auto operator<=>(const RewardGrant&) const = default;
};

/// Rejects records whose claimed average speed disagrees with distance/duration
/// by more than the tolerance, and non-positive durations.
Status validate_record(const WorkoutRecord& record, const RewardParams& params = {});

/// baseDmd = floor(distanceKm * baseRate); totalDmd = floor(baseDmd * bonus / 100).
/// bonusRatePct must be >= 100 (a pet never reduces rewards below base).
Result<RewardAmounts> compute_reward(const WorkoutRecord& record, std::uint32_t bonusRatePct,
                                     const RewardParams& params = {});

}  // namespace w2e
