#include "doctest.h"

#include "icgame/game.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace icg;

TEST_CASE("enumerate_states: sizes and probabilities") {
  SUBCASE("single player single gain") {
    auto spec = GameSpec::symmetric(1, {{2.0}, {}}, 1.0);
    auto space = enumerate_states(spec);
    REQUIRE(space.size() == 1);
    CHECK(space.probs[0] == 1.0);
    CHECK(space.states[0].gains(0, 0) == 2.0);
  }
  SUBCASE("three players, binary alphabets") {
    auto space = enumerate_states(oracle::example1());
    REQUIRE(space.size() == 512);
    for (Eigen::Index h = 0; h < space.probs.size(); ++h)
      CHECK(space.probs[h] == std::ldexp(1.0, -9));
  }
  SUBCASE("two players, 2 direct and 3 cross gains") {
    auto spec = GameSpec::symmetric(2, {{1.0, 2.0}, {0.1, 0.2, 0.3}}, 1.0);
    CHECK(enumerate_states(spec).size() == 36);
  }
}

TEST_CASE("enumerate_states: ordering is lexicographic in link index") {
  auto spec = GameSpec::symmetric(2, {{1.0, 2.0}, {0.1, 0.2, 0.3}}, 1.0);
  auto space = enumerate_states(spec);
  // link order (0,0) (0,1) (1,0) (1,1); the last link varies fastest
  CHECK(space.states[0].gains(1, 1) == 1.0);
  CHECK(space.states[1].gains(1, 1) == 2.0);
  CHECK(space.states[2].gains(1, 0) == 0.2);
  CHECK(space.states[35].gains(0, 0) == 2.0);
  CHECK(space.states[35].gains(0, 1) == 0.3);
  CHECK(space.index_of({1, 2, 2, 1}) == 35);

  long k = 0;
  oracle::for_each_state(spec, [&](const Matrix& g, double p) {
    CHECK(space.states[static_cast<std::size_t>(k)].gains == g);
    CHECK(space.probs[k] == doctest::Approx(p).epsilon(1e-15));
    ++k;
  });
}

TEST_CASE("enumerate_states: cap guard reports required size") {
  auto spec = oracle::example1();
  try {
    enumerate_states(spec, 100);
    FAIL("expected StateSpaceTooLarge");
  } catch (const StateSpaceTooLarge& e) {
    CHECK(e.required() == 512.0);
    CHECK(e.cap() == 100);
  }
  CHECK_NOTHROW(enumerate_states(spec, 512));
}

TEST_CASE("enumerate_states: probabilities sum to one for random distributions") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    auto spec = oracle::random_spec(rng, 3, false);
    auto space = enumerate_states(spec);
    CHECK(std::abs(space.probs.sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("GameSpec validation") {
  auto spec = oracle::example1();
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.gains.direct[0] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = spec;
  bad.pbar.pop_back();
  try {
    bad.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "pbar");
  }
  bad = spec;
  bad.dists.link(0, 1) = {0.7, 0.7};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("sinr") {
  SUBCASE("identity case") {
    auto spec = GameSpec::symmetric(1, {{1.0}, {}}, 1.0);
    ChannelState s{Matrix::Constant(1, 1, 1.0)};
    CHECK(sinr(spec, s, Vector::Constant(1, 1.0), 0) == 1.0);
    CHECK(sinr(spec, s, Vector::Zero(1), 0) == 0.0);
  }
  SUBCASE("one interferer") {
    auto spec = GameSpec::symmetric(2, {{3.0}, {0.5}}, 1.0);
    Matrix g(2, 2);
    g << 3.0, 0.5, 0.5, 3.0;
    Vector p(2);
    p << 2.0, 2.0;
    CHECK(sinr(spec, ChannelState{g}, p, 0) == doctest::Approx(3.0));
  }
  SUBCASE("alpha scales the signal") {
    auto spec = GameSpec::symmetric(1, {{1.0}, {}}, 1.0);
    spec.alpha = {0.5};
    ChannelState s{Matrix::Constant(1, 1, 2.0)};
    CHECK(sinr(spec, s, Vector::Constant(1, 3.0), 0) == doctest::Approx(3.0));
  }
}

TEST_CASE("expected_rate, average_power, sum_rate") {
  SUBCASE("zero profile") {
    auto spec = oracle::example1();
    auto space = enumerate_states(spec);
    PowerProfile zero = PowerProfile::Zero(3, 512);
    for (int i = 0; i < 3; ++i) {
      CHECK(expected_rate(spec, space, zero, i) == 0.0);
      CHECK(average_power(space, zero, i) == 0.0);
    }
    CHECK(sum_rate(spec, space, zero) == 0.0);
  }
  SUBCASE("single state single user") {
    auto spec = GameSpec::symmetric(1, {{1.0}, {}}, 1.0);
    auto space = enumerate_states(spec);
    PowerProfile p = PowerProfile::Constant(1, 1, 1.0);
    CHECK(expected_rate(spec, space, p, 0) == doctest::Approx(std::log(2.0)));
    CHECK(sum_rate(spec, space, p) == expected_rate(spec, space, p, 0));
  }
  SUBCASE("constant policy averages to the constant") {
    auto spec = oracle::example1();
    auto space = enumerate_states(spec);
    PowerProfile p = PowerProfile::Constant(3, 512, 0.7);
    CHECK(average_power(space, p, 1) == doctest::Approx(0.7).epsilon(1e-14));
  }
  SUBCASE("two states with unequal probabilities") {
    auto spec = GameSpec::symmetric(1, {{1.0, 2.0}, {}}, 1.0);
    spec.dists.link(0, 0) = {0.25, 0.75};
    auto space = enumerate_states(spec);
    PowerProfile p(1, 2);
    p << 4.0, 0.0;
    CHECK(average_power(space, p, 0) == doctest::Approx(1.0));
  }
  SUBCASE("symmetric two-user game") {
    auto spec = GameSpec::symmetric(2, {{1.0, 2.0}, {0.3}}, 1.0);
    auto space = enumerate_states(spec);
    // state (a, b) and its mirror get the mirrored policy
    PowerProfile p = PowerProfile::Constant(2, static_cast<Eigen::Index>(space.size()), 1.0);
    CHECK(sum_rate(spec, space, p) ==
          doctest::Approx(2.0 * expected_rate(spec, space, p, 0)).epsilon(1e-14));
  }
}

TEST_CASE("expected_rate matches brute-force re-enumeration") {
  Rng rng(5);
  SUBCASE("example 1, random profiles") {
    auto spec = oracle::example1();
    auto space = enumerate_states(spec);
    for (int t = 0; t < 5; ++t) {
      auto p = oracle::random_tight_profile(spec, space.probs, rng);
      for (int i = 0; i < 3; ++i)
        CHECK(std::abs(expected_rate(spec, space, p, i) -
                       oracle::brute_force_rate(spec, p, i)) < 1e-12);
    }
  }
  SUBCASE("random games with non-uniform links") {
    for (int t = 0; t < 20; ++t) {
      auto spec = oracle::random_spec(rng, 3, false, 2000);
      auto space = enumerate_states(spec);
      auto p = oracle::random_tight_profile(spec, space.probs, rng);
      for (int i = 0; i < spec.players; ++i)
        CHECK(std::abs(expected_rate(spec, space, p, i) -
                       oracle::brute_force_rate(spec, p, i)) < 1e-12);
    }
  }
}

TEST_CASE("expected_rate: concave in own policy, nonincreasing in others") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    auto spec = oracle::random_spec(rng, 3, false, 2000);
    if (spec.players < 2) continue;
    auto space = enumerate_states(spec);
    auto base = oracle::random_tight_profile(spec, space.probs, rng);
    auto a = oracle::random_tight_profile(spec, space.probs, rng);
    auto b = oracle::random_tight_profile(spec, space.probs, rng);
    const double theta = rng.uniform(0.05, 0.95);

    PowerProfile pa = base, pb = base, mix = base;
    pa.row(0) = a.row(0);
    pb.row(0) = b.row(0);
    mix.row(0) = theta * a.row(0) + (1 - theta) * b.row(0);
    CHECK(expected_rate(spec, space, mix, 0) >=
          theta * expected_rate(spec, space, pa, 0) +
              (1 - theta) * expected_rate(spec, space, pb, 0) - 1e-9);

    PowerProfile louder = base;
    const auto h = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(space.size()));
    louder(1, h) += 1.0;
    CHECK(expected_rate(spec, space, louder, 0) <= expected_rate(spec, space, base, 0));
  }
}

TEST_CASE("is_feasible") {
  auto spec = oracle::example1(2.0);
  auto space = enumerate_states(spec);
  PowerProfile zero = PowerProfile::Zero(3, 512);
  for (bool ok : is_feasible(space, zero, spec.pbar)) CHECK(ok);

  PowerProfile full = constant_profile(spec, space);
  CHECK(all_feasible(space, full, spec.pbar));

  PowerProfile neg = zero;
  neg(1, 7) = -1e-3;
  auto ok = is_feasible(space, neg, spec.pbar);
  CHECK(ok[0]);
  CHECK_FALSE(ok[1]);

  PowerProfile over = full;
  over.row(2) *= 1.001;
  CHECK_FALSE(is_feasible(space, over, spec.pbar)[2]);
}
