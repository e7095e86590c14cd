#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "w2e/events.hpp"
#include "w2e/token.hpp"

using namespace w2e;

namespace {

// internally consistent record: one hour at distanceM, claimed speed derived
WorkoutRecord hour_run(std::uint64_t distanceM) {
  WorkoutRecord rec;
  rec.distanceM = distanceM;
  rec.durationSec = 3600;
  rec.avgSpeedKmh = static_cast<double>(distanceM) / 1000.0;
  rec.steps = distanceM;
  rec.startedAt = 1'700'000'000;
  return rec;
}

}  // namespace

TEST_CASE("base and bonus amounts follow the stated formula") {
  auto r = compute_reward(hour_run(5000), 120);
  REQUIRE(r);
  CHECK(r->baseDmd == 50);
  CHECK(r->totalDmd == 60);

  r = compute_reward(hour_run(0), 100);
  REQUIRE(r);
  CHECK(r->baseDmd == 0);
  CHECK(r->totalDmd == 0);

  r = compute_reward(hour_run(999), 100);
  REQUIRE(r);
  CHECK(r->baseDmd == 9);  // floor(9.99)
  CHECK(r->totalDmd == 9);
}

TEST_CASE("rejections: inconsistent, implausible, zero duration, bad bonus") {
  WorkoutRecord liar = hour_run(5000);
  liar.avgSpeedKmh = 8.0;  // claims 8 km/h over a 5 km hour
  auto r = compute_reward(liar, 100);
  REQUIRE_FALSE(r);
  CHECK(r.code() == Err::InconsistentRecord);

  auto sprint = compute_reward(hour_run(35'000), 100);  // 35 km/h, consistent
  REQUIRE_FALSE(sprint);
  CHECK(sprint.code() == Err::ImplausibleRecord);

  WorkoutRecord frozen = hour_run(1000);
  frozen.durationSec = 0;
  auto z = compute_reward(frozen, 100);
  REQUIRE_FALSE(z);
  CHECK(z.code() == Err::InconsistentRecord);

  auto weak = compute_reward(hour_run(1000), 99);
  REQUIRE_FALSE(weak);
  CHECK(weak.code() == Err::InvalidBonusRate);

  // the tolerance window itself is honored
  WorkoutRecord nearMiss = hour_run(5000);
  nearMiss.avgSpeedKmh = 5.4;  // off by 0.4, inside the 0.5 gate
  CHECK(compute_reward(nearMiss, 100));
}

TEST_CASE("exhaustive distance scan against the floor inequalities") {
  // independent oracle: verify the defining property of the floor rather than
  // recomputing the implementation's expression
  const std::uint32_t bonuses[] = {100, 101, 120, 137, 150, 200};
  const Amount rate = RewardParams{}.baseRateDmdPerKm;
  Amount prevTotal[std::size(bonuses)] = {};
  for (std::uint64_t d = 0; d <= 10'000; ++d) {
    const WorkoutRecord rec = hour_run(d);
    Amount totals[std::size(bonuses)];
    for (std::size_t bi = 0; bi < std::size(bonuses); ++bi) {
      auto r = compute_reward(rec, bonuses[bi]);
      REQUIRE(r);
      const std::uint64_t base = r->baseDmd;
      const std::uint64_t total = r->totalDmd;
      // base == floor(d * rate / 1000)
      REQUIRE(base * 1000 <= d * rate);
      REQUIRE(d * rate < (base + 1) * 1000);
      // total == floor(base * bonus / 100)
      REQUIRE(total * 100 <= base * bonuses[bi]);
      REQUIRE(base * bonuses[bi] < (total + 1) * 100);
      totals[bi] = total;
      // monotone in distance for a fixed bonus
      REQUIRE(total >= prevTotal[bi]);
      prevTotal[bi] = total;
    }
    // higher bonus never yields a smaller total for the same record
    for (std::size_t bi = 1; bi < std::size(bonuses); ++bi)
      REQUIRE(totals[bi] >= totals[bi - 1]);
  }
}

TEST_CASE("grants gate on pet ownership and mint the computed total") {
  const Address op = address_from_label("test/operator");
  const Address runner = address_from_label("test/runner");
  const Address other = address_from_label("test/other");
  TokenEconomy eco(op);

  auto none = eco.grant_reward(runner, 1, hour_run(5000));
  REQUIRE_FALSE(none);
  CHECK(none.code() == Err::NotEarnable);
  CHECK(eco.balance_of(runner) == 0);
  CHECK(eco.pending_event_count() == 0);

  REQUIRE(eco.mint_pet(op, runner, 150));   // pet 1
  REQUIRE(eco.mint_pet(op, other, 120));    // pet 2
  (void)eco.drain_events();

  auto wrongPet = eco.grant_reward(runner, 2, hour_run(5000));
  REQUIRE_FALSE(wrongPet);
  CHECK(wrongPet.code() == Err::NotPetOwner);

  auto grant = eco.grant_reward(runner, 1, hour_run(5000));
  REQUIRE(grant);
  CHECK(grant->baseDmd == 50);
  CHECK(grant->bonusRatePct == 150);
  CHECK(grant->totalDmd == 75);
  CHECK(eco.balance_of(runner) == 75);
  CHECK(eco.total_supply() == 75);

  auto events = eco.drain_events();
  REQUIRE(events.size() == 2);
  CHECK(kind_of(events[0]) == EventKind::Transfer);  // mint from the zero address
  CHECK(std::get<TransferEvent>(events[0]).from == Address::zero());
  CHECK(kind_of(events[1]) == EventKind::Rewarded);
  CHECK(std::get<RewardedEvent>(events[1]).grant.totalDmd == 75);

  // repeated submission of the identical record is allowed and pays again
  REQUIRE(eco.grant_reward(runner, 1, hour_run(5000)));
  CHECK(eco.balance_of(runner) == 150);
}

TEST_CASE("failed grants mint nothing") {
  const Address op = address_from_label("test/operator");
  const Address runner = address_from_label("test/runner");
  TokenEconomy eco(op);
  REQUIRE(eco.mint_pet(op, runner, 120));
  (void)eco.drain_events();

  const auto digest = eco.state_digest();
  auto r = eco.grant_reward(runner, 1, hour_run(40'000));  // implausible
  REQUIRE_FALSE(r);
  CHECK(r.code() == Err::ImplausibleRecord);
  CHECK(eco.state_digest() == digest);
  CHECK(eco.pending_event_count() == 0);
}
