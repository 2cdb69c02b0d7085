#include "doctest.h"
#include "helpers.hpp"

#include "ergokit/channels.hpp"
#include "ergokit/geometry.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace ergokit;
using namespace ergotest;

TEST_SUITE_BEGIN("channels");

TEST_CASE("kraus validation") {
  Matrix half = Matrix::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(KrausChannel{std::vector<Matrix>{half}}, std::invalid_argument);
  CHECK_NOTHROW(KrausChannel{std::vector<Matrix>{Matrix::Identity(2, 2)}});
}

TEST_CASE("apply") {
  auto h = make_h({0.0, 0.0, 1.0});
  auto id = unitary_channel(Matrix::Identity(3, 3), "identity");
  auto rho = diag_state({0.5, 0.3, 0.2});
  CHECK(max_abs(apply(id, rho).matrix() - rho.matrix()) <= 1e-14);

  auto deph = dephasing(h);
  CHECK(max_abs(apply(deph, rho).matrix() - rho.matrix()) <= 1e-12);

  // the d=3 coherent pair dephases to the even mixture of the two levels
  auto out = apply(deph, coherent_pair(3, 1, 2));
  Matrix expect = Matrix::Zero(3, 3);
  expect(1, 1) = expect(2, 2) = 0.5;
  CHECK(max_abs(out.matrix() - expect) <= 1e-12);
}

TEST_CASE("dephasing properties") {
  auto h = make_h({0.0, 0.6, 1.4});
  auto deph = dephasing(h);
  CHECK(static_cast<int>(deph.kraus().size()) == 3);
  CHECK(is_unital(deph));
  CHECK(choi_is_psd(deph));

  for (double beta : {0.2, 1.0, 5.0}) {
    auto g = gibbs(h, beta).to_density(h);
    CHECK(max_abs(apply(deph, g).matrix() - g.matrix()) <= 1e-12);
  }

  std::mt19937_64 rng(201);
  auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
  auto once = apply(deph, rho);
  auto twice = apply(deph, once);
  CHECK(max_abs(once.matrix() - twice.matrix()) <= 1e-12);
}

TEST_CASE("partial dephasing") {
  auto h = make_h({0.0, 1.0});

  Matrix ones = Matrix::Ones(2, 2);
  auto idlike = partial_dephasing(h, ones);
  std::mt19937_64 rng(203);
  auto rho = random_state(2, StateMeasure::HilbertSchmidt, rng);
  CHECK(max_abs(apply(idlike, rho).matrix() - rho.matrix()) <= 1e-12);

  auto full = partial_dephasing(h, Matrix::Identity(2, 2));
  auto deph = dephasing(h);
  CHECK(max_abs(apply(full, rho).matrix() - apply(deph, rho).matrix()) <= 1e-12);

  Matrix coeffs(2, 2);
  coeffs << 1.0, 0.5, 0.5, 1.0;
  auto halved = partial_dephasing(h, coeffs);
  CHECK(choi_is_psd(halved));
  auto out = apply(halved, rho);
  CHECK(std::abs(out.matrix()(0, 1) - 0.5 * rho.matrix()(0, 1)) <= 1e-12);
  for (double beta : {0.3, 2.0}) {
    auto g = gibbs(h, beta).to_density(h);
    CHECK(max_abs(apply(halved, g).matrix() - g.matrix()) <= 1e-12);
  }

  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // |alpha| > 1, not PSD
  CHECK_THROWS_AS(partial_dephasing(h, bad), std::invalid_argument);
}

TEST_CASE("lambda beta map") {
  auto h = make_h({0.0, 0.5, 1.3});
  const double beta = 0.8;
  auto sigma_prime = gibbs(h, 2.5).to_density(h);
  auto lam = lambda_beta_map(h, beta, sigma_prime);
  CHECK(choi_is_psd(lam));

  const Matrix gamma = gibbs(h, beta).to_density(h).matrix();
  // any incoherent state is sent to gamma_beta
  std::mt19937_64 rng(207);
  for (int t = 0; t < 10; ++t) {
    auto p = random_passive(3, rng);
    CHECK(max_abs(apply(lam, p.to_density(h)).matrix() - gamma) <= 1e-10);
  }
  for (double bprime : {0.0, 1.0, 4.0}) {
    CHECK(max_abs(apply(lam, gibbs(h, bprime).to_density(h)).matrix() - gamma) <= 1e-10);
  }

  // the uniform-superposition branch prepares sigma'
  Vector psi = Vector::Constant(3, Complex(1.0 / std::sqrt(3.0), 0.0));
  DensityMatrix psi_state(psi * psi.adjoint());
  CHECK(max_abs(apply(lam, psi_state).matrix() - sigma_prime.matrix()) <= 1e-10);

  // sigma' too peaked makes sigma negative
  auto top_heavy = diag_state({0.0, 0.0, 1.0});
  CHECK_THROWS_AS(lambda_beta_map(h, 5.0, top_heavy), std::invalid_argument);
}

TEST_CASE("thermalizing map") {
  auto h = make_h({0.0, 1.0, 2.0});
  const double beta = 1.1;
  auto th = thermalizing(h, beta);
  CHECK(choi_is_psd(th));
  CHECK_FALSE(is_unital(th));

  const Matrix gamma = gibbs(h, beta).to_density(h).matrix();
  std::mt19937_64 rng(211);
  for (int t = 0; t < 10; ++t) {
    auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
    auto out = apply(th, rho);
    CHECK(max_abs(out.matrix() - gamma) <= 1e-10);
    CHECK(free_energy(h, out) <= 1e-10);
  }
}

TEST_CASE("unitary channel and mixtures") {
  auto h = make_h({0.0, 1.0});
  CHECK_THROWS_AS(unitary_channel(Matrix::Ones(2, 2)), std::invalid_argument);

  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  auto sw = unitary_channel(swap, "swap");
  auto ground = diag_state({1.0, 0.0});
  CHECK(energy(h, apply(sw, ground)) == doctest::Approx(1.0));

  std::mt19937_64 rng(213);
  auto rho = random_state(2, StateMeasure::HilbertSchmidt, rng);
  auto single = mixture({sw}, (RealVector(1) << 1.0).finished());
  CHECK(max_abs(apply(single, rho).matrix() - apply(sw, rho).matrix()) <= 1e-12);

  auto u1 = unitary_channel(random_unitary(2, rng));
  auto u2 = unitary_channel(random_unitary(2, rng));
  auto mixed = mixture({u1, u2}, (RealVector(2) << 0.35, 0.65).finished());
  CHECK(is_unital(mixed));
  CHECK(choi_is_psd(mixed));

  // extraction unitary maps rho onto its passive rearrangement
  auto h4 = make_h({0.0, 0.4, 1.0, 1.9});
  auto any = random_state(4, StateMeasure::HilbertSchmidt, rng);
  auto extr = unitary_channel(extraction_unitary(h4, any));
  Matrix target = passive_rearrangement(h4, any).to_density(h4).matrix();
  CHECK(max_abs(apply(extr, any).matrix() - target) <= 1e-8);
}

TEST_CASE("mixture of thermalizing maps leaves C for d = 3") {
  auto h = make_h({0.0, 1.0, 2.0});
  auto mix = mixture({thermalizing(h, 0.5), thermalizing(h, 2.0)},
                     (RealVector(2) << 0.5, 0.5).finished());
  std::mt19937_64 rng(217);
  auto out = apply(mix, random_state(3, StateMeasure::HilbertSchmidt, rng));

  // the output is an equal mixture of two Gibbs states: passive but not Gibbs
  CHECK(is_passive(h, out, 1e-10));
  RealVector p = out.matrix().diagonal().real();
  const double b12 = std::log(p(0) / p(1));
  const double b23 = std::log(p(1) / p(2));
  CHECK(std::abs(b12 - b23) > 0.1);
}

TEST_CASE("thermal operation") {
  auto h = make_h({0.0, 1.0});
  auto henv = make_h({0.0, 1.0, 2.0});
  const double beta = 0.9;
  auto th = thermal_operation(h, henv, beta, 31337);
  CHECK(choi_is_psd(th));

  auto g = gibbs(h, beta).to_density(h);
  CHECK(max_abs(apply(th, g).matrix() - g.matrix()) <= 1e-8);

  // dual route: the Kraus action equals the dense dilation partial trace
  const Matrix u = thermal_dilation_unitary(h, henv, beta, 31337);
  const Matrix htot =
      Eigen::kroneckerProduct(h.matrix(), Matrix::Identity(3, 3)).eval() +
      Eigen::kroneckerProduct(Matrix::Identity(2, 2), henv.matrix()).eval();
  CHECK(max_abs(u * htot - htot * u) <= 1e-9);  // energy conservation

  std::mt19937_64 rng(219);
  auto rho = random_state(2, StateMeasure::HilbertSchmidt, rng);
  const Matrix genv = gibbs(henv, beta).to_density(henv).matrix();
  const Matrix joint = u * Eigen::kroneckerProduct(rho.matrix(), genv).eval() * u.adjoint();
  CHECK((htot * joint).trace().real() ==
        doctest::Approx((htot * Eigen::kroneckerProduct(rho.matrix(), genv).eval())
                            .trace()
                            .real())
            .epsilon(1e-9));
  Matrix reduced = Matrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int e = 0; e < 3; ++e) reduced(a, b) += joint(a * 3 + e, b * 3 + e);
    }
  }
  CHECK(max_abs(apply(th, rho).matrix() - reduced) <= 1e-10);

  // trivial environment: an energy-conserving unitary channel
  auto h1 = make_h({0.0});
  auto triv = thermal_operation(h, h1, beta, 5);
  CHECK(static_cast<int>(triv.kraus().size()) == 1);
  CHECK(is_unital(triv));

  CHECK_THROWS_AS(thermal_operation(make_h({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}),
                                    make_h({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}),
                                    1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("random channel") {
  auto a = random_channel(3, 4, 99);
  auto b = random_channel(3, 4, 99);
  CHECK(static_cast<int>(a.kraus().size()) == 4);
  for (std::size_t i = 0; i < a.kraus().size(); ++i) {
    CHECK(max_abs(a.kraus()[i] - b.kraus()[i]) == 0.0);
  }
  CHECK(choi_is_psd(a));

  auto unitary_like = random_channel(3, 1, 7);
  CHECK(is_unital(unitary_like));
}

TEST_CASE("selective outcomes") {
  auto h = make_h({0.0, 1.0, 2.0});
  std::mt19937_64 rng(223);

  auto u = unitary_channel(random_unitary(3, rng));
  auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
  auto outs = selective_outcomes(u, rho);
  CHECK(outs.size() == 1);
  CHECK(outs[0].probability == doctest::Approx(1.0).epsilon(1e-12));

  auto deph_outs = selective_outcomes(dephasing(h), diag_state({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK(deph_outs.size() == 3);
  for (const auto& o : deph_outs) CHECK(o.probability == doctest::Approx(1.0 / 3).epsilon(1e-12));

  auto ch = random_channel(3, 3, 11);
  auto souts = selective_outcomes(ch, rho);
  Matrix recon = Matrix::Zero(3, 3);
  double total = 0.0;
  for (const auto& o : souts) {
    recon += o.probability * o.post_state.matrix();
    total += o.probability;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(max_abs(recon - apply(ch, rho).matrix()) <= 1e-8);
}

TEST_CASE("unital lemma and the unital free-operation criterion") {
  std::mt19937_64 rng(227);
  auto h = make_h({0.0, 0.8, 1.5});
  for (int t = 0; t < 300; ++t) {
    auto u1 = unitary_channel(random_unitary(3, rng));
    auto u2 = unitary_channel(random_unitary(3, rng));
    auto u3 = unitary_channel(random_unitary(3, rng));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RealVector w(3);
    w << unif(rng), unif(rng), unif(rng);
    w /= w.sum();
    auto ch = mixture({u1, u2, u3}, w);
    REQUIRE(is_unital(ch));

    auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
    auto out = apply(ch, rho);
    const RealVector p_in = spectral(rho).populations;
    const RealVector p_out = spectral(out).populations;
    double e_in = 0.0, e_out = 0.0;
    for (int k = 0; k < 3; ++k) {
      e_in += p_in(k) * h.eigenvalues()(k);
      e_out += p_out(k) * h.eigenvalues()(k);
    }
    CHECK(e_out >= e_in - 1e-9);  // E(P_{Lambda(rho)}) >= E(P_rho)

    if (energy(h, out) <= energy(h, rho)) {
      CHECK(ergotropy(h, out) <= ergotropy(h, rho) + 1e-9);
    }
  }
}

TEST_CASE("relative entropy is contractive under random channels") {
  std::mt19937_64 rng(229);
  for (int t = 0; t < 200; ++t) {
    auto ch = random_channel(3, 2 + (t % 3), derive_seed(777, t));
    auto a = random_state(3, StateMeasure::HilbertSchmidt, rng);
    auto b = random_state(3, StateMeasure::HilbertSchmidt, rng);
    const Divergence before = relative_entropy(a, b);
    const Divergence after = relative_entropy(apply(ch, a), apply(ch, b));
    if (!before.infinite && !after.infinite) {
      CHECK(after.value <= before.value + 1e-9);
    }
  }
}

TEST_CASE("channel families") {
  auto h = make_h({0.0, 1.0, 2.0});

  auto extr = extraction_family(h);
  std::mt19937_64 rng(231);
  auto rho = random_state(3, StateMeasure::HilbertSchmidt, rng);
  auto out = extr.apply(rho);
  CHECK(is_passive(h, out, 1e-8));
  CHECK(energy(h, rho) - energy(h, out) == doctest::Approx(ergotropy(h, rho)).epsilon(1e-9));

  auto fam = lambda_beta_tilde_family(h, 0.5);
  auto g = gibbs(h, 1.0).to_density(h);
  auto gout = fam.apply(g);
  CHECK(max_abs(gout.matrix() - gibbs(h, 1.5).to_density(h).matrix()) <= 1e-7);

  AnyChannel any = fam;
  CHECK(label_of(any) == "lambda-beta-tilde");
}

TEST_SUITE_END();
