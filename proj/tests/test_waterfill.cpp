#include "doctest.h"

#include "icgame/vi_solver.hpp"
#include "icgame/waterfill.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace icg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

Vector random_probs(Rng& rng, Eigen::Index n) {
  Vector p(n);
  for (auto& x : p) x = rng.uniform(0.01, 1.0);
  return p / p.sum();
}

}  // namespace

TEST_CASE("waterfill: worked examples") {
  SUBCASE("one state") {
    auto r = waterfill(vec({1.0}), vec({1.0}), 1.0);
    CHECK(r.level == 2.0);
    CHECK(r.powers[0] == 1.0);
    CHECK(r.active_states == 1);
  }
  SUBCASE("budget fills only the lower floor") {
    auto r = waterfill(vec({1.0, 3.0}), vec({0.5, 0.5}), 0.5);
    CHECK(r.level == doctest::Approx(2.0));
    CHECK(r.powers[0] == doctest::Approx(1.0));
    CHECK(r.powers[1] == 0.0);
    CHECK(r.active_states == 1);
  }
  SUBCASE("budget covers both floors") {
    auto r = waterfill(vec({1.0, 3.0}), vec({0.5, 0.5}), 2.0);
    CHECK(r.level == doctest::Approx(4.0));
    CHECK(r.powers[0] == doctest::Approx(3.0));
    CHECK(r.powers[1] == doctest::Approx(1.0));
  }
  SUBCASE("level exactly at the next floor") {
    auto r = waterfill(vec({1.0, 3.0}), vec({0.5, 0.5}), 1.0);
    CHECK(r.level == doctest::Approx(3.0));
    CHECK(r.powers[1] == doctest::Approx(0.0));
  }
  SUBCASE("tied floors share the water") {
    auto r = waterfill(vec({2.0, 1.0, 2.0}), vec({0.25, 0.5, 0.25}), 1.0);
    CHECK(r.level == doctest::Approx(2.5));
    CHECK(r.powers[0] == doctest::Approx(0.5));
    CHECK(r.powers[2] == doctest::Approx(0.5));
  }
  SUBCASE("zero-probability states stay at the level shape") {
    auto r = waterfill(vec({1.0, 5.0}), vec({1.0, 0.0}), 1.0);
    CHECK(r.level == doctest::Approx(2.0));
    CHECK(r.powers[1] == 0.0);
  }
}

TEST_CASE("waterfill: invalid input") {
  CHECK_THROWS_AS(waterfill(Vector(), Vector(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(waterfill(vec({1.0}), vec({0.5, 0.5}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(waterfill(vec({1.0}), vec({1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("waterfill: bisection oracle, budget equality and slackness on random instances") {
  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.uniform() * 40);
    Vector floors(n);
    for (auto& f : floors) f = rng.uniform(0.05, 10.0);
    if (t % 5 == 0 && n > 2) floors[1] = floors[0];  // exercise ties
    const Vector probs = random_probs(rng, n);
    const double pbar = rng.uniform(0.01, 8.0);

    const auto r = waterfill(floors, probs, pbar);
    const double ref = oracle::waterfill_level_bisection(floors, probs, pbar);
    CHECK(std::abs(r.level - ref) < 1e-9 * std::max(1.0, ref));
    CHECK(std::abs(r.powers.dot(probs) - pbar) < 1e-9);
    int active = 0;
    for (Eigen::Index h = 0; h < n; ++h) {
      CHECK(r.powers[h] >= 0.0);
      if (r.powers[h] > 0.0) {
        ++active;
        CHECK(std::abs(r.level - floors[h] - r.powers[h]) < 1e-9);
      } else {
        CHECK(r.level <= floors[h] + 1e-9);
      }
    }
    CHECK(active == r.active_states);
  }
}

TEST_CASE("waterfill: higher floors never get more power") {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto n = 2 + static_cast<Eigen::Index>(rng.uniform() * 20);
    Vector floors(n);
    for (auto& f : floors) f = rng.uniform(0.05, 5.0);
    const Vector probs = random_probs(rng, n);
    const double pbar = rng.uniform(0.1, 4.0);
    Vector raised = floors;
    for (auto& f : raised)
      if (rng.uniform() < 0.5) f += rng.uniform(0.0, 2.0);
    const auto a = waterfill(floors, probs, pbar);
    const auto b = waterfill(raised, probs, pbar);
    CHECK(b.level >= a.level - 1e-12);
    for (Eigen::Index h = 0; h < n; ++h)
      if (raised[h] == floors[h]) CHECK(b.powers[h] >= a.powers[h] - 1e-9);
  }
}

TEST_CASE("interference_floor") {
  SUBCASE("no interference") {
    auto spec = GameSpec::symmetric(1, {{1.0}, {}}, 1.0);
    auto space = enumerate_states(spec);
    CHECK(interference_floor(spec, space, PowerProfile::Ones(1, 1), 0)[0] == 1.0);
  }
  SUBCASE("one interferer") {
    auto spec = GameSpec::symmetric(2, {{2.0}, {0.5}}, 1.0);
    auto space = enumerate_states(spec);
    PowerProfile p = PowerProfile::Constant(2, 1, 2.0);
    CHECK(interference_floor(spec, space, p, 0)[0] == doctest::Approx(1.0));
  }
  SUBCASE("affine increasing in the other players' powers") {
    auto spec = oracle::example1();
    auto space = enumerate_states(spec);
    Rng rng(1);
    auto p = oracle::random_tight_profile(spec, space.probs, rng);
    auto base = interference_floor(spec, space, p, 0);
    auto q = p;
    q(2, 10) += 1.0;
    auto moved = interference_floor(spec, space, q, 0);
    const auto& g = space.states[10].gains;
    CHECK(moved[10] - base[10] == doctest::Approx(g(0, 2) / g(0, 0)));
    moved[10] = base[10];
    CHECK(moved == base);
    q(0, 11) += 3.0;  // own power does not enter the floor
    CHECK(interference_floor(spec, space, q, 0)[11] == base[11]);
  }
}

TEST_CASE("best_response") {
  SUBCASE("single user water-filling over inverse gains") {
    auto spec = GameSpec::symmetric(1, {{1.0, 4.0}, {}}, 1.0);
    auto space = enumerate_states(spec);
    auto r = best_response(spec, space, PowerProfile::Zero(1, 2), 0);
    // floors (1, 0.25), probs (0.5, 0.5): level 1.625
    CHECK(r.level == doctest::Approx(1.625));
    CHECK(r.powers[0] == doctest::Approx(0.625));
    CHECK(r.powers[1] == doctest::Approx(1.375));
  }
  SUBCASE("variational characterization and projection form") {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
      auto spec = oracle::random_spec(rng, 3, false, 500);
      auto space = enumerate_states(spec);
      auto prof = oracle::random_tight_profile(spec, space.probs, rng);
      for (int i = 0; i < spec.players; ++i) {
        const auto br = best_response(spec, space, prof, i);
        const Vector f = interference_floor(spec, space, prof, i);
        const double pbar = spec.pbar[static_cast<std::size_t>(i)];
        for (int k = 0; k < 100; ++k) {
          auto v = oracle::random_tight_profile(spec, space.probs, rng);
          const Vector vi = v.row(i).transpose();
          const double gap =
              (space.probs.array() * (br.powers + f).array() * (vi - br.powers).array()).sum();
          CHECK(gap >= -1e-8);
        }
        const Vector proj = project_block(-f, space.probs, pbar, BudgetSet::tight);
        CHECK((proj - br.powers).lpNorm<Eigen::Infinity>() < 1e-9);
      }
    }
  }
}

TEST_CASE("iterate_waterfilling") {
  SUBCASE("single player converges after one round") {
    auto spec = GameSpec::symmetric(1, {{1.0, 2.0, 0.5}, {}}, 1.5);
    auto space = enumerate_states(spec);
    auto r = iterate_waterfilling(spec, space, constant_profile(spec, space));
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.residual_history.back() < 1e-12);
  }
  SUBCASE("example 1, simultaneous and sequential") {
    auto spec = oracle::example1();
    auto space = enumerate_states(spec);
    auto sim = iterate_waterfilling(spec, space, constant_profile(spec, space));
    CHECK(sim.converged);
    CHECK(sim.scheme == IwfScheme::simultaneous);
    CHECK(waterfill_residual(spec, space, sim.profile) < 1e-6);
    CHECK(all_feasible(space, sim.profile, spec.pbar));
    IwfOptions seq;
    seq.scheme = IwfScheme::sequential;
    auto gs = iterate_waterfilling(spec, space, constant_profile(spec, space), seq);
    CHECK(gs.converged);
    CHECK((gs.profile - sim.profile).lpNorm<Eigen::Infinity>() < 1e-6);
  }
  SUBCASE("counterexample reports non-convergence") {
    auto spec = oracle::counterexample();
    auto space = enumerate_states(spec);
    IwfOptions o;
    o.max_iter = 100;
    auto r = iterate_waterfilling(spec, space, constant_profile(spec, space), o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 100);
    CHECK(r.residual_history.size() == 101);
  }
  SUBCASE("scheme names") {
    CHECK(iwf_scheme_from_string("sequential") == IwfScheme::sequential);
    CHECK(to_string(IwfScheme::simultaneous) == "simultaneous");
    CHECK_THROWS_AS(iwf_scheme_from_string("jacobi"), ValidationError);
  }
}

TEST_CASE("iterate_waterfilling: unique limit under contraction") {
  Rng rng(404);
  int checked = 0;
  while (checked < 10) {
    auto spec = oracle::random_spec(rng, 3, false, 400);
    if (spec.players < 2 || !contraction_condition(spec).ok) continue;
    ++checked;
    auto space = enumerate_states(spec);
    IwfOptions o;
    o.tol = 1e-10;
    o.max_iter = 5000;
    PowerProfile first;
    for (int s = 0; s < 10; ++s) {
      auto r = iterate_waterfilling(spec, space,
                                    oracle::random_tight_profile(spec, space.probs, rng), o);
      REQUIRE(r.converged);
      if (s == 0) first = r.profile;
      CHECK((r.profile - first).lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }
}
