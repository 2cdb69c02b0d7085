#include "doctest.h"
#include "helpers.hpp"

#include "ergokit/geometry.hpp"

#include <cmath>
#include <vector>

using namespace ergokit;
using namespace ergotest;

namespace {

// Brute-force minimum over the ordered simplex (d = 3) at a given resolution.
template <typename F>
double ordered_simplex_grid_min(const F& f, double res) {
  double best = std::numeric_limits<double>::infinity();
  for (double p1 = 1.0 / 3.0; p1 <= 1.0 + 1e-12; p1 += res) {
    const double lo2 = std::max(0.0, (1.0 - p1) / 2.0);
    const double hi2 = std::min(p1, 1.0 - p1);
    for (double p2 = lo2; p2 <= hi2 + 1e-12; p2 += res) {
      const double p3 = 1.0 - p1 - p2;
      if (p3 < -1e-12 || p3 > p2 + 1e-12) continue;
      RealVector p(3);
      p << p1, p2, std::max(p3, 0.0);
      const double v = f(p);
      if (v < best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("relative entropy examples") {
  auto rho = diag_state({0.3, 0.7});
  CHECK(relative_entropy(rho, rho).value == doctest::Approx(0.0).epsilon(1e-12));

  auto pure = diag_state({1.0, 0.0});
  auto mixed = diag_state({0.5, 0.5});
  auto s = relative_entropy(pure, mixed);
  CHECK_FALSE(s.infinite);
  CHECK(s.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK(relative_entropy(mixed, pure).infinite);
}

TEST_CASE("relative entropy against the classical formula") {
  std::mt19937_64 rng(71);
  auto h = make_h({0.0, 1.0, 2.0});
  for (int t = 0; t < 100; ++t) {
    auto p = random_passive(3, rng);
    const double beta = 0.3 + 0.1 * t;
    auto g = gibbs(h, beta);
    const double expect = classical_rel_entropy(p.populations(), g.populations());
    CHECK(relative_entropy(p.to_density(h), g.to_density(h)).value ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("tsallis divergence") {
  auto rho = diag_state({0.6, 0.4});
  for (double alpha : {0.5, 2.0}) {
    CHECK(tsallis_divergence(rho, rho, alpha).value == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(tsallis_divergence(diag_state({0.8, 0.2}), diag_state({0.5, 0.5}), 2.0).value ==
        doctest::Approx(0.36).epsilon(1e-12));

  CHECK_THROWS_AS(tsallis_divergence(rho, rho, -0.3), std::invalid_argument);
  CHECK(tsallis_divergence(diag_state({0.5, 0.5}), diag_state({1.0, 0.0}), 2.0).infinite);

  // continuity at alpha -> 1
  std::mt19937_64 rng(73);
  for (int t = 0; t < 50; ++t) {
    auto a = random_state(3, StateMeasure::HilbertSchmidt, rng);
    auto b = random_state(3, StateMeasure::HilbertSchmidt, rng);
    const double ref = relative_entropy(a, b).value;
    if (ref > 1.0) continue;  // the alpha-derivative grows with the divergence
    for (double alpha : {1.0 - 1e-4, 1.0 + 1e-4}) {
      CHECK(std::abs(tsallis_divergence(a, b, alpha).value - ref) <= 1e-3);
    }
  }
}

TEST_CASE("nonequilibrium temperature") {
  auto h = make_h({0.0, 1.0});
  auto rho = diag_state({0.2, 0.8});

  // Gibbs reference: T(gamma_beta | rho) = 1/beta for any non-passive rho
  for (double beta : {0.4, 1.0, 2.7}) {
    CHECK(noneq_temperature(h, gibbs(h, beta).as_passive(), rho) ==
          doctest::Approx(1.0 / beta).epsilon(1e-8));
  }
  CHECK(noneq_temperature(h, PassiveState((RealVector(2) << 0.8, 0.2).finished()), rho) ==
        doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-10));

  CHECK_THROWS_AS(noneq_temperature(h, gibbs(h, 1.0).as_passive(), diag_state({0.8, 0.2})),
                  std::domain_error);
  CHECK_THROWS_AS(
      noneq_temperature(h, PassiveState((RealVector(2) << 1.0, 0.0).finished()), rho),
      std::domain_error);
}

TEST_CASE("dephasing raises the nonequilibrium temperature in the d=3 example") {
  auto h = make_h({0.0, 0.0, 1.0});
  auto rho = coherent_pair(3, 1, 2);
  PassiveState p((RealVector(3) << 0.6, 0.2, 0.2).finished());

  const double t_in = noneq_temperature(h, p, rho);
  CHECK(t_in == doctest::Approx(1.0 / std::log(9.0)).epsilon(1e-10));

  auto dephased = diag_state({0.0, 0.5, 0.5});
  const double t_out = noneq_temperature(h, p, dephased);
  CHECK(t_out == doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-10));
  CHECK(t_out > t_in);
}

TEST_CASE("tsallis temperatures") {
  auto h = make_h({0.0, 1.0});
  auto rho = diag_state({0.2, 0.8});
  const double erg = ergotropy(h, rho);

  SUBCASE("alpha -> 1 limit") {
    std::mt19937_64 rng(79);
    for (int t = 0; t < 20; ++t) {
      auto r = random_state(3, StateMeasure::HilbertSchmidt, rng);
      auto h3 = make_h({0.0, 0.7, 1.9});
      if (ergotropy(h3, r) <= 1e-6) continue;
      auto p = random_passive(3, rng);
      if (p.populations().minCoeff() < 1e-2) continue;  // conditioning of the limit
      const double ref = noneq_temperature(h3, p, r);
      if (std::abs(ref) > 2.0) continue;
      for (double alpha : {1.0 - 1e-5, 1.0 + 1e-5}) {
        CHECK(std::abs(tsallis_temperature_p(h3, p, r, alpha) - ref) <= 1e-4);
      }
    }
  }

  SUBCASE("product at the minimizer equals the ergotropy") {
    for (double alpha : {0.5, 1.5, 2.0}) {
      PassiveState prho((RealVector(2) << 0.8, 0.2).finished());
      const double t = tsallis_temperature_p(h, prho, rho, alpha);
      const double s = tsallis_divergence(rho, prho.to_density(h), alpha).value;
      CHECK(t * s == doctest::Approx(erg).epsilon(1e-8));
    }
  }

  SUBCASE("gibbs argument keeps the product above the ergotropy") {
    for (double beta : {0.5, 1.5}) {
      auto g = gibbs(h, beta);
      const double t = tsallis_temperature_p(h, g.as_passive(), rho, 2.0);
      const double s = tsallis_divergence(rho, g.to_density(h), 2.0).value;
      CHECK(t * s >= erg - 1e-9);
    }
  }

  SUBCASE("cp variant") {
    for (double alpha : {0.5, 1.5, 2.0}) {
      auto grho = gibbs(h, beta_of_state(h, rho).beta);
      const double t = tsallis_temperature_cp(h, grho, rho, alpha);
      const double s = tsallis_divergence(rho, grho.to_density(h), alpha).value;
      CHECK(t * s == doctest::Approx(free_energy(h, rho)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(tsallis_temperature_cp(h, gibbs(h, 1.0),
                                           gibbs(h, 1.0).to_density(h), 2.0),
                    std::domain_error);
  }
}

TEST_CASE("distance to the free sets") {
  auto h = make_h({0.0, 1.0});
  auto g = gibbs(h, 1.2);
  CHECK(distance_to_free(h, g.to_density(h), g) == doctest::Approx(0.0).epsilon(1e-10));

  std::mt19937_64 rng(83);
  auto h3 = make_h({0.0, 0.8, 1.7});
  for (int t = 0; t < 100; ++t) {
    auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
    if (ergotropy(h3, rho) <= 1e-8) continue;
    const PassiveState prho = passive_rearrangement(h3, rho);
    if (prho.populations().minCoeff() < 1e-12) continue;
    CHECK(distance_to_free(h3, rho, prho) ==
          doctest::Approx(ergotropy(h3, rho)).epsilon(1e-8));

    const BetaSolution bs = beta_of_state(h3, rho);
    if (!bs.beta.infinite && bs.beta.value > 0.0) {
      CHECK(distance_to_free(h3, rho, gibbs(h3, bs.beta.value)) ==
            doctest::Approx(free_energy(h3, rho)).epsilon(1e-8));
    }
  }

  CHECK_THROWS_AS(distance_to_free(h, g.to_density(h), gibbs(h, 0.0)), std::domain_error);
}

TEST_CASE("monotone M_cp") {
  auto h = make_h({0.0, 1.0});

  auto at_gibbs = monotone_Mcp(h, gibbs(h, 1.4).to_density(h));
  CHECK(at_gibbs.value <= 1e-10);
  CHECK(at_gibbs.beta->value == doctest::Approx(1.4).epsilon(1e-4));

  // dense-grid oracle for the inverted qubit
  auto rho = diag_state({0.2, 0.8});
  const double s = entropy(rho), e = energy(h, rho);
  double grid_best = std::numeric_limits<double>::infinity();
  double grid_arg = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double beta = 1e-4 * std::pow(1e8, i / 999999.0);
    const double v = -s + beta * e + log_partition(h, beta);
    if (v < grid_best) {
      grid_best = v;
      grid_arg = beta;
    }
  }
  const double at_zero = -s + std::log(2.0);
  if (at_zero < grid_best) {
    grid_best = at_zero;
    grid_arg = 0.0;
  }
  auto res = monotone_Mcp(h, rho);
  CHECK(res.value == doctest::Approx(grid_best).epsilon(1e-7));
  CHECK(std::abs(res.beta->value - grid_arg) <= 1e-3);

  // pure top level: S(rho||gamma_beta) is increasing in beta, boundary minimizer
  auto top = monotone_Mcp(h, diag_state({0.0, 1.0}));
  CHECK(top.beta->value == 0.0);
  CHECK(top.value == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  // Helmholtz relation M_cp = beta-hat * Delta F_{beta-hat}
  std::mt19937_64 rng(89);
  for (int t = 0; t < 50; ++t) {
    auto any = random_state(3, StateMeasure::HilbertSchmidt, rng);
    auto h3 = make_h({0.0, 0.9, 2.1});
    auto m = monotone_Mcp(h3, any);
    if (m.beta->value > 1e-10) {
      const double delta_f =
          relative_entropy(any, gibbs(h3, m.beta->value).to_density(h3)).value /
          m.beta->value;
      CHECK(m.value == doctest::Approx(m.beta->value * delta_f).epsilon(1e-7));
    }
  }
}

TEST_CASE("monotone M_p via PAV") {
  auto h = make_h({0.0, 1.0, 2.0});

  auto passive = monotone_Mp(h, diag_state({0.5, 0.3, 0.2}));
  CHECK(passive.value <= 1e-10);
  CHECK(passive.minimizer(0) == doctest::Approx(0.5));

  auto pooled = monotone_Mp(h, diag_state({0.2, 0.5, 0.3}));
  CHECK(pooled.minimizer(0) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(pooled.minimizer(1) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(pooled.minimizer(2) == doctest::Approx(0.30).epsilon(1e-12));

  // brute-force grid over the ordered simplex
  auto rho = diag_state({0.2, 0.5, 0.3});
  const double s = entropy(rho);
  auto objective = [&](const RealVector& p) {
    double cross = 0.0;
    RealVector a(3);
    a << 0.2, 0.5, 0.3;
    for (int k = 0; k < 3; ++k) {
      if (a(k) > 0.0) cross += a(k) * std::log(std::max(p(k), 1e-300));
    }
    return -s - cross;
  };
  const double grid_best = ordered_simplex_grid_min(objective, 1e-3);
  CHECK(pooled.value <= grid_best + 1e-9);
  CHECK(pooled.value == doctest::Approx(grid_best).epsilon(2e-3));

  auto h2 = make_h({0.0, 1.0});
  auto plus = monotone_Mp(h2, coherent_pair(2, 0, 1));
  CHECK(plus.minimizer(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plus.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("family M_p") {
  auto h = make_h({0.0, 0.9, 2.0});
  std::mt19937_64 rng(97);

  SUBCASE("nu = 1 recovers the ergotropy") {
    for (int t = 0; t < 10; ++t) {
      auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
      if (ergotropy(h, rho) <= 1e-8) continue;
      for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        auto res = family_Mp(h, rho, alpha, 1.0, 1000 + t);
        CHECK(res.value == doctest::Approx(ergotropy(h, rho)).epsilon(1e-6));
      }
    }
  }

  SUBCASE("nu = 0 matches the brute-force Tsallis minimization") {
    auto rho = random_state(3, StateMeasure::HilbertSchmidt, 4242);
    const double alpha = 2.0;
    auto res = family_Mp(h, rho, alpha, 0.0, 7);
    auto objective = [&](const RealVector& p) {
      return tsallis_divergence(rho, PassiveState(p).to_density(h), alpha).value;
    };
    const double grid_best = ordered_simplex_grid_min(
        [&](const RealVector& p) {
          RealVector q = p.cwiseMax(1e-12);
          q /= q.sum();
          std::sort(q.data(), q.data() + q.size(), std::greater<double>());
          return objective(q);
        },
        2e-3);
    CHECK(res.value <= grid_best + 1e-9);
    CHECK(res.value == doctest::Approx(grid_best).epsilon(5e-3));
  }

  SUBCASE("passive input") {
    auto passive = diag_state({0.6, 0.25, 0.15});
    CHECK(family_Mp(h, passive, 2.0, 0.0, 1).value <= 1e-9);
    CHECK_THROWS_AS(family_Mp(h, passive, 2.0, 0.5, 1), std::domain_error);
  }
}

TEST_CASE("family M_cp") {
  auto h = make_h({0.0, 1.0});
  auto rho = diag_state({0.2, 0.8});

  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    auto res = family_Mcp(h, rho, alpha, 1.0);
    CHECK(res.value == doctest::Approx(free_energy(h, rho)).epsilon(1e-6));
  }

  CHECK(family_Mcp(h, gibbs(h, 1.1).to_density(h), 1.5, 0.7).value <= 1e-10);

  auto a = family_Mcp(h, rho, 1.0, 0.0);
  auto b = monotone_Mcp(h, rho);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
}

TEST_CASE("the minimization inequality of the passive theory") {
  std::mt19937_64 rng(101);
  for (int d : {2, 3, 4}) {
    RealVector eps(d);
    for (int k = 0; k < d; ++k) eps(k) = 0.5 * k + 0.1 * k * k;
    Hamiltonian h(eps);
    int checked = 0;
    for (int t = 0; t < 400 && checked < 250; ++t) {
      auto rho = random_state(d, StateMeasure::HilbertSchmidt, rng);
      const double erg = ergotropy(h, rho);
      if (erg <= 1e-8) continue;
      auto p = random_passive(d, rng);
      if (p.populations().minCoeff() < 1e-10) continue;
      const RealVector r = spectral(rho).populations;
      double denom = 0.0;
      Matrix re = to_energy_basis(h, rho.matrix());
      for (int k = 0; k < d; ++k) {
        denom += std::log(p.populations()(k)) * (r(k) - re(k, k).real());
      }
      if (denom <= 1e-12) continue;
      ++checked;
      const double product =
          noneq_temperature(h, p, rho) * relative_entropy(rho, p.to_density(h)).value;
      CHECK(product >= erg - 1e-9);
      // near-equality only happens near the minimizer P_rho
      if (product - erg <= 1e-8) {
        CHECK((p.populations() - r).cwiseAbs().maxCoeff() <= 0.05);
      }
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("distance decomposition identity") {
  std::mt19937_64 rng(103);
  auto h = make_h({0.0, 0.7, 1.5, 2.8});
  for (int t = 0; t < 300; ++t) {
    auto rho = random_state(4, StateMeasure::HilbertSchmidt, rng);
    const double f = free_energy(h, rho);
    const double erg = ergotropy(h, rho);
    const double f_passive = free_energy_of(h, spectral(rho).populations);
    CHECK(std::abs(f - erg - f_passive) <= 1e-8);
  }
}

TEST_CASE("free energy equals the grid minimum of T S") {
  std::mt19937_64 rng(107);
  auto h = make_h({0.0, 1.0, 2.2});
  for (int t = 0; t < 20; ++t) {
    auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
    const double s = entropy(rho), e = energy(h, rho);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) {
      const double beta = 1e-3 * std::pow(1e6, i / 19999.0);
      const double v = (-s + beta * e + log_partition(h, beta)) / beta;
      best = std::min(best, v);
    }
    const double f = free_energy(h, rho);
    CHECK(f <= best + 1e-9);
    CHECK(f == doctest::Approx(best).epsilon(1e-4));
  }
}

TEST_CASE("the d=3 distance witness is not contracted by dephasing") {
  auto h = make_h({0.0, 0.0, 1.0});
  auto rho = coherent_pair(3, 1, 2);
  PassiveState p((RealVector(3) << 0.6, 0.2, 0.2).finished());

  const double d_before = distance_to_free(h, rho, p);
  const double d_after = distance_to_free(h, diag_state({0.0, 0.5, 0.5}), p);
  CHECK(d_after > d_before);

  // frozen closed forms: D = -ln(p2 p3)/(2 ln(p1^2/(p2 p3))) and
  // D' = -ln(4 p2 p3)/(2 ln(p1/p3))
  const double expect_before = -std::log(0.04) / (2.0 * std::log(9.0));
  const double expect_after = -std::log(0.16) / (2.0 * std::log(3.0));
  CHECK(d_before == doctest::Approx(expect_before).epsilon(1e-10));
  CHECK(d_after == doctest::Approx(expect_after).epsilon(1e-10));
}

TEST_CASE("multistart results are reproducible per seed") {
  auto h = make_h({0.0, 0.8, 1.9});
  auto rho = random_state(3, StateMeasure::HilbertSchmidt, 606);
  REQUIRE(ergotropy(h, rho) > 1e-8);
  for (double nu : {0.0, 0.4, 1.0}) {
    auto a = family_Mp(h, rho, 1.7, nu, 12345);
    auto b = family_Mp(h, rho, 1.7, nu, 12345);
    CHECK(std::abs(a.value - b.value) <= 1e-8);
    CHECK((a.minimizer - b.minimizer).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("nu interpolation bound") {
  auto h = make_h({0.0, 0.8, 1.9});
  auto rho = random_state(3, StateMeasure::HilbertSchmidt, 555);
  REQUIRE(ergotropy(h, rho) > 1e-6);
  for (double alpha : {1.0, 2.0}) {
    const double m0 = family_Mp(h, rho, alpha, 0.0, 9).value;
    for (auto [nu, x] : std::vector<std::pair<double, double>>{
             {0.3, 0.5}, {0.5, 1.0}, {0.2, 0.8}}) {
      const double mnu = family_Mp(h, rho, alpha, nu, 9).value;
      const double mx = family_Mp(h, rho, alpha, x, 9).value;
      const double bound = std::pow(mx, nu / x) * std::pow(m0, 1.0 - nu / x);
      CHECK(mnu >= bound * (1.0 - 1e-6) - 1e-9);
    }
  }
}

TEST_SUITE_END();
