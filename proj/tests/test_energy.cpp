#include <doctest.h>

#include "loramesh/energy.hpp"

using namespace loramesh;

TEST_CASE("charge per state follows the current table") {
  EnergyLedger l(EnergyModel{});
  l.add_node(1);
  l.charge_interval(1, RadioState::Tx, 0.0, 3.6);  // 3.6 s at 500 mA
  CHECK(l.at(1).consumed_mah() == doctest::Approx(0.5));
  l.charge_interval(1, RadioState::Rx, 3.6, 36.0);
  CHECK(l.at(1).consumed_mah() == doctest::Approx(1.0));
  l.charge_interval(1, RadioState::Idle, 39.6, 360.0);
  CHECK(l.at(1).consumed_mah() == doctest::Approx(1.1));
  CHECK(l.at(1).alive_s() == doctest::Approx(399.6));
  CHECK(l.at(1).tx_s == doctest::Approx(3.6));
}

TEST_CASE("level history records each quantized drop") {
  EnergyModel m;
  m.battery_capacity_mah = 10.0;
  EnergyLedger l(m);
  l.add_node(2);
  l.charge_interval(2, RadioState::Tx, 0.0, 7.2);  // 1 mAh -> 90%
  const auto& h = l.at(2).history;
  REQUIRE(h.size() >= 2);
  CHECK(h.front() == std::pair<double, int>{0.0, 100});
  CHECK(h.back().second == 90);
  CHECK(l.at(2).level == 90);
  CHECK(l.level_at(2, 0.0) == 100);
  CHECK(l.level_at(2, 100.0) == 90);
}

TEST_CASE("depletion inside an interval gives the exact death time") {
  EnergyModel m;
  m.battery_capacity_mah = 1.0;
  EnergyLedger l(m);
  l.add_node(3);
  l.charge_interval(3, RadioState::Tx, 10.0, 100.0);  // empties after 7.2 s
  CHECK(l.at(3).dead);
  CHECK(l.at(3).death_time == doctest::Approx(17.2));
  CHECK(l.at(3).remaining_mah == doctest::Approx(0.0));
  const double before = l.at(3).alive_s();
  l.charge_interval(3, RadioState::Idle, 110.0, 5.0);
  CHECK(l.at(3).alive_s() == before);
}

TEST_CASE("mains-powered nodes never die") {
  EnergyModel m;
  m.battery_capacity_mah = 1.0;
  EnergyLedger l(m);
  l.add_node(0, true);
  l.charge_interval(0, RadioState::Tx, 0.0, 1000.0);
  CHECK_FALSE(l.at(0).dead);
  CHECK(l.at(0).tx_s == doctest::Approx(1000.0));
}
