#include <doctest.h>

#include "finitist/errors.hpp"
#include "finitist/rate.hpp"

using namespace finitist;

TEST_CASE("catalog values") {
  CHECK(RateFunction::affine(2).at(3) == 8);
  CHECK(RateFunction::power(2).at(7) == 49);
  CHECK(RateFunction::exponential(2).at(10) == 1024);
  CHECK(RateFunction::parse("compose(pow:2,affine:1)").at(3) == 16);
  CHECK(RateFunction::parse("max(affine:2,pow:2)").at(1) == 4);
  CHECK(RateFunction::parse("max(affine:2,pow:2)").at(5) == 25);
  CHECK(RateFunction::parse("shift(2,id)").at(3) == 5);
  CHECK(RateFunction::parse("iterate(3,affine:2)").at(0) == 14);
  CHECK(RateFunction::parse("add(1,pow:2)").at(4) == 17);
}

TEST_CASE("ids are canonical") {
  auto f = RateFunction::parse(" compose( pow:2 , affine:1 ) ");
  CHECK(f.id() == "compose(pow:2,affine:1)");
  CHECK(RateFunction::parse(f.id()) == f);
  CHECK(RateFunction::pointwise_max(f, f) == f);
}

TEST_CASE("bad ids") {
  CHECK_THROWS_AS(RateFunction::parse("cube:3"), ParseError);
  CHECK_THROWS_AS(RateFunction::parse("affine:"), ParseError);
  CHECK_THROWS_AS(RateFunction::parse("max(id"), ParseError);
  CHECK_THROWS_AS(RateFunction::parse("id id"), ParseError);
}

TEST_CASE("budgets") {
  CHECK_THROWS_AS(RateFunction::exponential(2).at(64), BudgetExceeded);
  CHECK(RateFunction::exponential(2).at(63) == (std::uint64_t{1} << 63));
  NumberBudget small{16};
  CHECK_THROWS_AS(RateFunction::power(3)(Natural(100), small), BudgetExceeded);
  CHECK(RateFunction::power(3)(Natural(10), small) == 1000);
  Natural big = RateFunction::exponential(3)(Natural(200));
  CHECK(big > Natural(1) << 300);
}
