#include <random>
#include <vector>

#include <doctest.h>

#include "needle/config.hpp"

using needle::ChargeConfiguration;
using needle::Errc;
using needle::Error;

namespace {

// Random strictly increasing interior points between the pinned endpoints.
std::vector<double> random_positions(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(1e-3, 1.0 - 1e-3);
  std::vector<double> p(n);
  p.front() = 0.0;
  p.back() = 1.0;
  std::vector<double> mid(n - 2);
  for (auto& v : mid) v = dist(rng);
  std::sort(mid.begin(), mid.end());
  std::copy(mid.begin(), mid.end(), p.begin() + 1);
  return p;
}

}  // namespace

TEST_CASE("equispaced endpoints are exact and gaps uniform") {
  const auto c = needle::equispaced(5);
  REQUIRE(c.n() == 5);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c[2] == 0.5);
  CHECK(c[4] == 1.0);

  const auto big = needle::equispaced(257);
  CHECK(big[0] == 0.0);
  CHECK(big[256] == 1.0);

  CHECK(needle::equispaced(2).positions() == std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(needle::equispaced(1), Error);
}

TEST_CASE("validate reports the first violated invariant") {
  auto code_of = [](std::vector<double> p) {
    return needle::validate(p).code;
  };
  CHECK(needle::validate(std::vector<double>{0.0, 0.3, 1.0}).ok);
  CHECK(code_of({0.5}) == Errc::InvalidCount);
  CHECK(code_of({1e-17, 0.5, 1.0}) == Errc::EndpointNotPinned);
  CHECK(code_of({0.0, 0.5, 0.999999}) == Errc::EndpointNotPinned);
  CHECK(code_of({0.0, -0.1, 1.0}) == Errc::OutOfRange);
  CHECK(code_of({0.0, 1.5, 1.0}) == Errc::OutOfRange);
  CHECK(code_of({0.0, 0.5, 0.5, 1.0}) == Errc::OrderViolation);
  CHECK(code_of({0.0, 0.6, 0.4, 1.0}) == Errc::OrderViolation);

  const auto tie = needle::validate(std::vector<double>{0.0, 0.5, 0.5, 1.0});
  CHECK(tie.index == 2);  // second member of the offending pair

  CHECK_THROWS_AS(ChargeConfiguration::from_positions({0.0, 0.5, 0.4, 1.0}),
                  Error);
}

TEST_CASE("reflect flips positions and is an involution") {
  const auto c = needle::equispaced(5);
  const auto r = needle::reflect(c);
  CHECK(r.positions() == c.positions());  // equispaced is symmetric

  const auto a = ChargeConfiguration::from_positions({0.0, 0.1, 0.4, 1.0});
  const auto ra = needle::reflect(a);
  CHECK(ra[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(ra[2] == doctest::Approx(0.9).epsilon(1e-15));

  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = ChargeConfiguration::from_positions(random_positions(rng, 9));
    const auto back = needle::reflect(needle::reflect(p));
    for (std::size_t i = 0; i < p.n(); ++i) {
      // 1 - (1 - x) is not exact in binary floating point, so allow a
      // one-ulp-scale absolute slack.
      CHECK(std::abs(back[i] - p[i]) <= 3e-16);
    }
  }
}

TEST_CASE("interior coordinates round-trip with the full configuration") {
  const auto c = ChargeConfiguration::from_positions({0.0, 0.2, 0.7, 1.0});
  const auto interior = needle::interior_of(c);
  CHECK(interior.interior() == std::vector<double>{0.2, 0.7});
  CHECK(interior.n() == 4);
  CHECK(needle::config_from_interior(interior) == c);

  // n = 2 has an empty interior.
  const auto two = needle::interior_of(needle::equispaced(2));
  CHECK(two.interior_size() == 0);
  CHECK(needle::config_from_interior(two).positions() ==
        std::vector<double>{0.0, 1.0});

  CHECK_THROWS_AS(needle::OpenSimplexPoint::from_interior({0.0, 0.5}), Error);
  CHECK_THROWS_AS(needle::OpenSimplexPoint::from_interior({0.5, 0.5}), Error);
  CHECK_THROWS_AS(needle::OpenSimplexPoint::from_interior({0.5, 1.0}), Error);
}

TEST_CASE("closed simplex points allow ties but not disorder") {
  const auto tied = needle::ClosedSimplexPoint::from_coords({0.0, 0.0, 1.0});
  CHECK(tied.n() == 3);
  CHECK_THROWS_AS(needle::ClosedSimplexPoint::from_coords({0.0, 0.6, 0.5}),
                  Error);
  CHECK_THROWS_AS(needle::ClosedSimplexPoint::from_coords({-0.1, 0.5}), Error);
  CHECK_THROWS_AS(needle::ClosedSimplexPoint::from_coords({0.3}), Error);
}

TEST_CASE("text serialization round-trips bit-exactly") {
  std::mt19937 rng(11);
  const auto c = ChargeConfiguration::from_positions(random_positions(rng, 17));
  const auto back = needle::config_from_text(needle::to_text(c));
  CHECK(back == c);

  // Blank lines are tolerated.
  CHECK(needle::config_from_text("0\n\n0.5\n1\n").positions() ==
        std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(needle::config_from_text("0\nabc\n1\n"), Error);
}

TEST_CASE("json array serialization round-trips bit-exactly") {
  std::mt19937 rng(13);
  const auto c = ChargeConfiguration::from_positions(random_positions(rng, 33));
  const auto back = needle::config_from_json_array(needle::to_json_array(c));
  CHECK(back == c);

  CHECK(needle::config_from_json_array("[0, 0.5, 1]").positions() ==
        std::vector<double>{0.0, 0.5, 1.0});
  CHECK(needle::to_json_array(needle::equispaced(3)) == "[0,0.5,1]");
  CHECK_THROWS_AS(needle::config_from_json_array("0,0.5,1"), Error);
  CHECK_THROWS_AS(needle::config_from_json_array("[0,0.5,1"), Error);
  CHECK_THROWS_AS(needle::config_from_json_array("[0,0.5,1]x"), Error);
  CHECK_THROWS_AS(needle::config_from_json_array("[]"), Error);
}

TEST_CASE("format_double renders shortest-faithful decimal forms") {
  CHECK(needle::format_double(0.5) == "0.5");
  CHECK(needle::format_double(0.0) == "0");
  CHECK(needle::format_double(1.0) == "1");
  CHECK(needle::format_double(0.1) == "0.10000000000000001");
  // 17 significant digits identify every double uniquely.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = dist(rng);
    CHECK(std::stod(needle::format_double(v)) == v);
  }
}
