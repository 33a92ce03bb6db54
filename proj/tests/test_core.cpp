#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forgecast/core.hpp"

#include <cmath>
#include <limits>

using namespace forgecast;

TEST_CASE("make_split produces contiguous ordered segments") {
  const SplitSpec s = make_split(3000, 2875, 100, 25);
  CHECK(s.train_end == 2875);
  CHECK(s.valid_end == 2975);
  CHECK(s.test_end == 3000);
  CHECK(s.train_size() == 2875);
  CHECK(s.valid_size() == 100);
  CHECK(s.test_size() == 25);

  const SplitSpec tiny = make_split(3, 1, 1, 1);
  CHECK(tiny.train_end == 1);
  CHECK(tiny.valid_end == 2);
  CHECK(tiny.test_end == 3);
}

TEST_CASE("make_split rejects out-of-range segments") {
  CHECK_THROWS_AS(make_split(10, 8, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_split(10, 0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_split(10, 5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_split(10, 5, 2, 0), std::invalid_argument);
}

TEST_CASE("ages_of counts down to zero") {
  SUBCASE("three training samples") {
    const Array ages = ages_of(SplitSpec{3, 4, 5});
    REQUIRE(ages.size() == 3);
    CHECK(ages[0] == 2.0);
    CHECK(ages[1] == 1.0);
    CHECK(ages[2] == 0.0);
  }
  SUBCASE("single training sample") {
    const Array ages = ages_of(SplitSpec{1, 2, 3});
    REQUIRE(ages.size() == 1);
    CHECK(ages[0] == 0.0);
  }
  SUBCASE("benchmark-sized split") {
    const Array ages = ages_of(make_split(3000, 2875, 100, 25));
    REQUIRE(ages.size() == 2875);
    CHECK(ages[0] == 2874.0);
    CHECK(ages[ages.size() - 1] == 0.0);
    for (Index i = 1; i < ages.size(); ++i) CHECK(ages[i] == ages[i - 1] - 1.0);
  }
}

TEST_CASE("Dataset validates shape and finiteness") {
  Matrix x(2, 1);
  x << 1.0, 2.0;
  Vector y(2);
  y << 3.0, 4.0;
  const Dataset ds(x, y);
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 1);

  Vector bad_len(3);
  bad_len << 1, 2, 3;
  CHECK_THROWS_AS(Dataset(x, bad_len), std::invalid_argument);

  Matrix with_nan = x;
  with_nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(with_nan, y), std::invalid_argument);

  Vector with_inf = y;
  with_inf[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset(x, with_inf), std::invalid_argument);
}

TEST_CASE("Dataset::from_rows rejects ragged rows") {
  CHECK_THROWS_WITH_AS(Dataset::from_rows({{1.0, 2.0}, {3.0}}, {1.0, 2.0}),
                       doctest::Contains("ragged"), std::invalid_argument);
  const Dataset ds = Dataset::from_rows({{1.0, 2.0}, {3.0, 4.0}}, {5.0, 6.0});
  CHECK(ds.dim() == 2);
  CHECK(ds.labels()[1] == 6.0);
}

TEST_CASE("make_lag_dataset builds most-recent-first designs") {
  const std::vector<double> y{1, 2, 3, 4, 5};
  const Dataset ds = make_lag_dataset(y, 3);
  REQUIRE(ds.size() == 2);
  REQUIRE(ds.dim() == 3);
  CHECK(ds.features()(0, 0) == 3.0);
  CHECK(ds.features()(0, 1) == 2.0);
  CHECK(ds.features()(0, 2) == 1.0);
  CHECK(ds.labels()[0] == 4.0);
  CHECK(ds.features()(1, 0) == 4.0);
  CHECK(ds.features()(1, 1) == 3.0);
  CHECK(ds.features()(1, 2) == 2.0);
  CHECK(ds.labels()[1] == 5.0);
}

TEST_CASE("make_lag_dataset edge cases") {
  const std::vector<double> constant(6, 2.5);
  const Dataset ds = make_lag_dataset(constant, 3);
  CHECK(ds.size() == 3);
  CHECK((ds.features().array() == 2.5).all());
  CHECK((ds.labels().array() == 2.5).all());

  const std::vector<double> short_series{1, 2, 3};
  CHECK_THROWS_AS(make_lag_dataset(short_series, 3), std::invalid_argument);
}

TEST_CASE("squared error loss") {
  CHECK(squared_error(3.0, 1.0) == 4.0);
  CHECK(squared_error(1.0, 1.0) == 0.0);
  CHECK(squared_error(-1.0, 2.0) == 9.0);
}
