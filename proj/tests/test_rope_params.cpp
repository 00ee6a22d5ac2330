#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ropeid/rope_params.hpp"

using namespace ropeid;

TEST_CASE("default bounds match the in-distribution training ranges") {
  ParamBounds b;
  CHECK(b.ordered());
  CHECK(b.min[0] == 20.0);
  CHECK(b.max[0] == 26.0);
  CHECK(b.min[1] == doctest::Approx(0.45));
  CHECK(b.max[1] == doctest::Approx(0.65));
  CHECK(b.min[2] == doctest::Approx(0.001));
  CHECK(b.max[2] == doctest::Approx(0.05));
  CHECK(b.min[3] == doctest::Approx(0.05));
  CHECK(b.max[3] == doctest::Approx(1.0));
  CHECK(b.min[4] == doctest::Approx(0.003));
  CHECK(b.max[4] == doctest::Approx(0.015));
  CHECK(b.min[5] == doctest::Approx(0.02));
  CHECK(b.max[5] == doctest::Approx(0.12));
  CHECK(b.min[6] == doctest::Approx(0.02));
  CHECK(b.max[6] == doctest::Approx(0.12));
  CHECK(b.min[7] == doctest::Approx(0.015));
  CHECK(b.max[7] == doctest::Approx(0.045));
  CHECK(b.min[8] == doctest::Approx(0.5));
  CHECK(b.max[8] == doctest::Approx(1.2));
}

TEST_CASE("normalize maps bounds corners and clamps out-of-range values") {
  ParamBounds b;
  RopeParams p;
  p.rope_length_m = 0.45;
  CHECK(normalize(p, b).values[1] == doctest::Approx(0.0));
  p.rope_length_m = 0.55;
  CHECK(normalize(p, b).values[1] == doctest::Approx(0.5));
  p.ball_damping = 1.5;  // far out of range -> saturates
  CHECK(normalize(p, b).values[2] == doctest::Approx(1.0));

  p.rope_length_m = std::nan("");
  CHECK_THROWS(normalize(p, b));
}

TEST_CASE("denormalize hits the bounds corners and round-trips") {
  ParamBounds b;
  NormalizedParams zeros, ones;
  zeros.values.fill(0.0);
  ones.values.fill(1.0);
  const RopeParams lo = denormalize(zeros, b);
  const RopeParams hi = denormalize(ones, b);
  CHECK(lo.num_links == 20);
  CHECK(hi.num_links == 26);
  CHECK(lo.rope_length_m == doctest::Approx(0.45));
  CHECK(hi.rope_length_m == doctest::Approx(0.65));
  CHECK(lo.link_extra_scale == doctest::Approx(0.5));
  CHECK(hi.link_extra_scale == doctest::Approx(1.2));

  // round trip on the num_links integer grid
  NormalizedParams v;
  for (int i = 0; i < kNumRopeParams; ++i) v.values[i] = 0.25 + 0.05 * i;
  v.values[0] = 3.0 / 6.0;  // 23 links
  const NormalizedParams back = normalize(denormalize(v, b), b);
  for (int i = 0; i < kNumRopeParams; ++i) CHECK(back.values[i] == doctest::Approx(v.values[i]));

  NormalizedParams bad;
  bad.values.fill(0.5);
  bad.values[3] = 1.2;
  CHECK_THROWS(denormalize(bad, b));
}

TEST_CASE("LHS stratification: one sample per bin in every dimension") {
  const int n = 100;
  const auto unit = sample_lhs_unit(n, 7);
  for (int d = 0; d < kNumRopeParams; ++d) {
    std::vector<double> coords;
    for (const auto& s : unit) coords.push_back(s.values[d]);
    std::sort(coords.begin(), coords.end());
    for (int k = 0; k < n; ++k) {
      CHECK(coords[k] >= static_cast<double>(k) / n);
      CHECK(coords[k] < static_cast<double>(k + 1) / n);
    }
  }
}

TEST_CASE("LHS is deterministic and in-box") {
  ParamBounds b;
  const auto a1 = sample_lhs(25, b, 42);
  const auto a2 = sample_lhs(25, b, 42);
  REQUIRE(a1.size() == 25);
  for (std::size_t i = 0; i < a1.size(); ++i) {
    CHECK(a1[i].as_array() == a2[i].as_array());
    const auto raw = a1[i].as_array();
    for (int d = 1; d < kNumRopeParams; ++d) {
      CHECK(raw[d] >= b.min[d]);
      CHECK(raw[d] <= b.max[d]);
    }
    CHECK(a1[i].num_links >= 20);
    CHECK(a1[i].num_links <= 26);
  }

  const auto one = sample_lhs(1, b, 3);
  REQUIRE(one.size() == 1);
  for (int d = 1; d < kNumRopeParams; ++d) {
    CHECK(one[0].as_array()[d] > b.min[d]);
    CHECK(one[0].as_array()[d] < b.max[d]);
  }
}

TEST_CASE("validate reports violations") {
  RopeParams p;
  CHECK(validate(p).empty());

  p.num_links = 1;
  CHECK(!validate(p).empty());

  p = RopeParams{};
  p.ball_stiffness = -0.1;
  const auto v = validate(p);
  REQUIRE(!v.empty());
  CHECK(v.front().find("ball_stiffness") != std::string::npos);
}

TEST_CASE("json round trip uses the exact field names") {
  RopeParams p;
  p.num_links = 24;
  p.rope_length_m = 0.5;
  const std::string text = to_json(p);
  CHECK(text.find("\"num_links\"") != std::string::npos);
  CHECK(text.find("\"rope_length_m\"") != std::string::npos);
  CHECK(text.find("\"mass_per_unit_length_kg_m\"") != std::string::npos);
  const RopeParams q = rope_params_from_json(text);
  CHECK(q.as_array() == p.as_array());

  ParamBounds b;
  const ParamBounds b2 = bounds_from_json(to_json(b));
  CHECK(b2.min == b.min);
  CHECK(b2.max == b.max);
}
