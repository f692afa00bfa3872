#include "doctest.h"

#include <cmath>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/entropy.hpp"
#include "kahlerdyn/error.hpp"

using namespace kahlerdyn;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

TorusSpec cat_spec() {
  Eigen::MatrixXcd A(2, 2);
  A << 2, 1, 1, 1;
  return TorusSpec::standard(2, A);
}

TorusSpec identity_spec(int k = 2) { return TorusSpec::standard(k, Eigen::MatrixXcd::Identity(k, k)); }

}  // namespace

TEST_CASE("Bowen box volumes") {
  const double eps = 0.05;
  // Unit eigenvectors of diag(A, A) with A symmetric are orthonormal: |det| = 1.
  double base = 4.0 * std::log(2.0 * eps);
  CHECK(bowen_ball_log_volume({cat_spec(), 0, eps, {}}) == doctest::Approx(base).epsilon(1e-12));
  CHECK(bowen_ball_log_volume({identity_spec(), 7, eps, {}}) == doctest::Approx(base).epsilon(1e-12));
  double lv = bowen_ball_log_volume({cat_spec(), 10, eps, {}});
  CHECK(lv == doctest::Approx(base - 10.0 * 2.0 * std::log(kPhi * kPhi)).epsilon(1e-12));
  for (int n : {50, 200}) {
    double r = -bowen_ball_log_volume({cat_spec(), n, eps, {}}) / n;
    CHECK(std::abs(r - 4.0 * std::log(kPhi)) < std::abs(base) / n + 1e-12);
  }

  // Rotation by i has no real eigenbasis.
  Eigen::MatrixXcd R(1, 1);
  R << std::complex<double>(0.0, 1.0);
  CHECK_THROWS_WITH_AS(bowen_ball_log_volume({TorusSpec::standard(1, R), 3, eps, {}}), "use monte-carlo", Error);
  CHECK_THROWS_AS(bowen_ball_log_volume({cat_spec(), 3, 0.2, {}}), Error);
}

TEST_CASE("Bowen Monte Carlo agrees with boxes") {
  const double eps = 0.05;
  for (int n = 0; n <= 4; ++n) {
    BowenQuery q{cat_spec(), n, eps, {}};
    auto mc = bowen_ball_monte_carlo(q, 400000, 11);
    double exact = std::exp(bowen_ball_log_volume(q) - bowen_ball_log_volume({cat_spec(), 0, eps, {}}));
    CHECK(std::abs(mc.fraction - exact) <= 3.0 * mc.std_error + 1e-15);
  }
  BowenQuery q{cat_spec(), 3, eps, {}};
  CHECK(bowen_ball_monte_carlo(q, 50000, 3, 0, 1).hits == bowen_ball_monte_carlo(q, 50000, 3, 0, 4).hits);

  // Rotation of order 4 is an isometry for the standard basis: every sample stays.
  Eigen::MatrixXcd R(1, 1);
  R << std::complex<double>(0.0, 1.0);
  auto rot = bowen_ball_monte_carlo({TorusSpec::standard(1, R), 6, eps, {}}, 20000, 5);
  CHECK(rot.fraction == 1.0);
}

TEST_CASE("Brin-Katok estimates") {
  std::vector<Eigen::VectorXd> centers;
  for (int c = 0; c < 3; ++c) centers.push_back(Eigen::Vector4d(0.1 * c, 0.2, 0.3 * c, 0.7));
  auto est = brin_katok_estimate(cat_spec(), 20, 0.05, centers, 1000);
  CHECK(est.method == "exact-box");
  CHECK(est.h_value == doctest::Approx(4.0 * std::log(kPhi)).epsilon(1e-12));
  CHECK(std::abs(est.h_value - 1.9248) < 0.02);
  CHECK(est.per_center.size() == 3);
  CHECK(est.raw_value > est.h_value);

  CHECK(brin_katok_estimate(identity_spec(), 30, 0.05, {}, 1000).h_value == 0.0);
  Eigen::VectorXcd b(2);
  b << 0.31, std::complex<double>(0.0, 0.17);
  CHECK(brin_katok_estimate(TorusSpec::standard(2, Eigen::MatrixXcd::Identity(2, 2), b), 30, 0.05, {}, 1000)
            .h_value == 0.0);

  auto mc = brin_katok_estimate(cat_spec(), 3, 0.05, centers, 300000, 9, "monte-carlo");
  CHECK(mc.method == "monte-carlo");
  CHECK(std::abs(mc.h_value - 4.0 * std::log(kPhi)) <= 3.0 * mc.error_bar + 1e-12);
  CHECK_THROWS_WITH_AS(brin_katok_estimate(cat_spec(), 20, 0.05, centers, 1000, 1, "monte-carlo"),
                       "n too large for sample budget", Error);
}

TEST_CASE("Misiurewicz bound") {
  std::vector<double> c, n, flat;
  for (int i = 1; i <= 12; ++i) {
    c.push_back(std::pow(2.0, -i));
    flat.push_back(0.3);
    n.push_back(i);
  }
  CHECK(misiurewicz_bound(c, n) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(misiurewicz_bound(flat, n) == 0.0);
  CHECK(misiurewicz_bound({0.25}, {2.0}) == doctest::Approx(std::log(2.0)));

  std::vector<double> vols, ns;
  for (int i = 2; i <= 20; i += 2) {
    vols.push_back(std::exp(bowen_ball_log_volume({cat_spec(), i, 0.05, {}})));
    ns.push_back(i);
  }
  double h = misiurewicz_bound(vols, ns);
  CHECK(h == doctest::Approx(4.0 * std::log(kPhi)).epsilon(1e-10));
  CHECK(h <= dynamical_degrees(build_torus_cohomology(cat_spec())).entropy + 1e-6);
  CHECK_THROWS_AS(misiurewicz_bound({1.0, 0.0}, {1.0, 2.0}), Error);
}

TEST_CASE("Lyapunov exponents and de Thelin") {
  auto ly = lyapunov_exponents(cat_spec());
  REQUIRE(ly.exponents.size() == 4);
  const double chi = 2.0 * std::log(kPhi);
  CHECK(std::abs(ly.exponents[0] - chi) < 1e-10);
  CHECK(std::abs(ly.exponents[1] - chi) < 1e-10);
  CHECK(std::abs(ly.exponents[2] + chi) < 1e-10);
  CHECK(std::abs(ly.exponents[3] + chi) < 1e-10);
  CHECK(ly.distinct.size() == 2);
  CHECK(ly.distinct[0].second == 2);
  CHECK(ly.hyperbolic);
  CHECK(std::abs(ly.sum) < 1e-10);

  auto id = lyapunov_exponents(identity_spec());
  CHECK_FALSE(id.hyperbolic);
  for (double e : id.exponents) CHECK(e == 0.0);

  auto prof = dynamical_degrees(build_torus_cohomology(cat_spec()));
  auto v = de_thelin_check(ly, prof);
  CHECK(v.passed);
  CHECK(v.p == 1);
  CHECK(v.bound_plus == doctest::Approx(chi).epsilon(1e-12));
  CHECK(v.equality_gap < 1e-9);
  CHECK(v.equality_gap > -1e-9);
  CHECK_THROWS_WITH_AS(de_thelin_check(id, dynamical_degrees(build_torus_cohomology(identity_spec()))),
                       "no strictly maximal dynamical degree", Error);

  // Product map: top degree d_1^2 at p = 2.
  auto prod = product_torus_spec(cat_spec(), cat_spec());
  auto pl = lyapunov_exponents(prod);
  auto pp = dynamical_degrees(build_torus_cohomology(prod));
  auto pv = de_thelin_check(pl, pp);
  CHECK(pv.p == 2);
  CHECK(pv.passed);
  CHECK(pv.count_plus == 2);
  CHECK(pv.count_minus == 2);
  CHECK(std::abs(pv.equality_gap) < 1e-9);

  // Wrong exponents fail the count.
  LyapunovSpectrum fake = ly;
  fake.exponents = {0.1, 0.1, -0.1, -0.1};
  CHECK_FALSE(de_thelin_check(fake, prof).passed);
}

TEST_CASE("Yomdin ball masses") {
  auto rep = yomdin_ball_mass(cat_spec(), 8, 0.05, 0.2, 1000);
  CHECK(rep.p == 1);
  CHECK(rep.method == "exact-box");
  REQUIRE(rep.values.size() == 9);
  CHECK(rep.bounded);
  CHECK(rep.growth_rate < 0.0);
  CHECK(rep.A == doctest::Approx(*std::max_element(rep.values.begin(), rep.values.end())));
  // Density is the pairing <(f^n)^* omega, omega>, which times the box volume is
  // bounded; the e^{-n delta} weight makes the sequence decay.
  for (int n = 1; n <= 8; ++n) CHECK(rep.values[n] < rep.values[n - 1]);

  auto id = yomdin_ball_mass(identity_spec(), 6, 0.05, 0.2, 1000, 1, 4, 1);
  for (int n = 0; n <= 6; ++n) {
    CHECK(id.density[n] == doctest::Approx(id.density[0]));
    CHECK(id.values[n] == doctest::Approx(id.values[0] * std::exp(-0.2 * n)));
  }
  CHECK_THROWS_AS(yomdin_ball_mass(cat_spec(), 4, 0.3, 0.2, 1000), Error);
}
