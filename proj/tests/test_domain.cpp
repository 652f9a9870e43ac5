#include <doctest.h>

#include "flexgrid/domain.hpp"
#include "support.hpp"

using namespace flexgrid;

TEST_SUITE("domain") {

TEST_CASE("schedule validation accepts an evening kettle slot") {
  CHECK(!validate_schedule({Appliance::kettle, 1080, 10, 2}));
}

TEST_CASE("schedule validation rejects shifts past the day edges") {
  // start 1, flexibility 2: could start at minute -1
  auto code = validate_schedule({Appliance::kettle, 1, 10, 2});
  REQUIRE(code);
  CHECK(*code == ErrorCode::start_underflow);

  // 1435 + 10 runs past midnight even with no flexibility
  code = validate_schedule({Appliance::kettle, 1435, 10, 0});
  REQUIRE(code);
  CHECK(*code == ErrorCode::horizon_overflow);
}

TEST_CASE("schedule validation rejects degenerate durations and flexibility") {
  auto code = validate_schedule({Appliance::oven, 600, 0, 5});
  REQUIRE(code);
  CHECK(*code == ErrorCode::non_positive_duration);

  code = validate_schedule({Appliance::oven, 600, 30, -1});
  REQUIRE(code);
  CHECK(*code == ErrorCode::negative_flexibility);
}

TEST_CASE("ensure_valid throws with the violated rule") {
  CHECK_NOTHROW(ensure_valid({Appliance::hob, 700, 30, 10}));
  try {
    ensure_valid({Appliance::hob, 0, 30, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::start_underflow);
  }
}

TEST_CASE("appliance names round-trip and accept loose spellings") {
  for (Appliance a : kAllAppliances) {
    auto parsed = parse_appliance(to_string(a));
    REQUIRE(parsed);
    CHECK(*parsed == a);
  }
  CHECK(parse_appliance("Dish-Washer") == Appliance::dish_washer);
  CHECK(parse_appliance("Washing Machine") == Appliance::washing_machine);
  CHECK(!parse_appliance("toaster"));
}

TEST_CASE("house types parse both separators") {
  CHECK(parse_house_type("semi-detached") == HouseType::semi_detached);
  CHECK(parse_house_type("Mid_Terrace") == HouseType::mid_terrace);
  CHECK(!parse_house_type("boat"));
}

TEST_CASE("constraint factories validate their windows") {
  CHECK_NOTHROW(forbidden_window(Appliance::washing_machine, 1260, 1440));
  CHECK_THROWS_AS(forbidden_window(Appliance::washing_machine, 1300, 1200),
                  Error);
  CHECK_THROWS_AS(forbidden_window(Appliance::washing_machine, -5, 100), Error);
  CHECK_THROWS_AS(forbidden_window(Appliance::washing_machine, 0, 2000), Error);
}

}  // TEST_SUITE
