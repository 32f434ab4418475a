#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "loramesh/core.hpp"

using namespace loramesh;

TEST_CASE("airtime of the default 20-byte frame") {
  RadioConfig c;
  CHECK(airtime(c, 20) == doctest::Approx(0.014144).epsilon(1e-12));
}

TEST_CASE("airtime grows with payload and spreading factor") {
  RadioConfig c;
  CHECK(airtime(c, 40) > airtime(c, 20));
  RadioConfig slow = c;
  slow.spreading_factor = 12;
  CHECK(airtime(slow, 20) > airtime(c, 20));
}

TEST_CASE("airtime rejects frames over 255 bytes") {
  RadioConfig c;
  CHECK_THROWS_AS(airtime(c, 256), std::invalid_argument);
  CHECK_NOTHROW(airtime(c, 255));
}

TEST_CASE("radio config validation") {
  RadioConfig c;
  c.spreading_factor = 13;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RadioConfig{};
  c.coding_rate_denominator = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("battery quantization floors and clamps") {
  CHECK(quantize_battery(100.0, 100.0) == 100);
  CHECK(quantize_battery(40.99, 100.0) == 40);
  CHECK(quantize_battery(0.0, 100.0) == 0);
  CHECK(quantize_battery(120.0, 100.0) == 100);
  CHECK_THROWS(quantize_battery(-1.0, 100.0));
  CHECK(quantize_battery(5.5, 11.0) == 50);
  CHECK_THROWS(quantize_battery(1.0, 0.0));
}

TEST_CASE("broadcast frames address everyone") {
  Packet p;
  CHECK(p.addressed_to(7));
  p.routed = true;
  p.next_hop = 3;
  CHECK(p.addressed_to(3));
  CHECK_FALSE(p.addressed_to(7));
  p.next_hop.reset();
  p.forward_set = {4, 5};
  CHECK(p.addressed_to(5));
  CHECK_FALSE(p.addressed_to(3));
}

TEST_CASE("role names round-trip") {
  for (Role r : {Role::Gateway, Role::Repeater, Role::EndDevice})
    CHECK(role_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(role_from_string("router"), ConfigError);
}
