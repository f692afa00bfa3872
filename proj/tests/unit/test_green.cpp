#include "doctest.h"

#include <cmath>
#include <random>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/green.hpp"

using namespace kahlerdyn;
using cd = std::complex<double>;

namespace {

const double kD1 = (7.0 + 3.0 * std::sqrt(5.0)) / 2.0;

std::shared_ptr<const Torus> std_torus(int k) {
  auto spec = TorusSpec::standard(k, Eigen::MatrixXcd::Identity(k, k));
  return std::make_shared<Torus>(k, spec.lattice_basis);
}

TorusMap cat_map(std::shared_ptr<const Torus> X) {
  Eigen::MatrixXcd A(2, 2);
  A << 2, 1, 1, 1;
  return TorusMap(X, A, Eigen::VectorXcd::Zero(2));
}

// lim d^{-n} M^n c from left and right dominant eigenvectors.
Eigen::VectorXd dominant_projection(const Eigen::MatrixXd& M, const Eigen::VectorXd& c) {
  Eigen::EigenSolver<Eigen::MatrixXd> r(M), l(Eigen::MatrixXd(M.transpose()));
  Eigen::Index ir = 0, il = 0;
  r.eigenvalues().cwiseAbs().maxCoeff(&ir);
  l.eigenvalues().cwiseAbs().maxCoeff(&il);
  Eigen::VectorXd v = r.eigenvectors().col(ir).real();
  Eigen::VectorXd w = l.eigenvectors().col(il).real();
  return v * (w.dot(c) / w.dot(v));
}

FourierForm bump(std::shared_ptr<const Torus> X, const Mode& m, double a) {
  return ddc(FourierForm::cos_mode(X, m, a));
}

}  // namespace

TEST_CASE("iterate_green gate") {
  auto X = std_torus(2);
  TorusMap id(X, Eigen::MatrixXcd::Identity(2, 2), Eigen::VectorXcd::Zero(2));
  CHECK_THROWS_WITH_AS(iterate_green(id, FourierForm::omega_power(X, 1), 5), "d_{q-1} < d_q violated", Error);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(4);
  e(3) = 1.0;
  auto f = cat_map(X);
  CHECK_THROWS_AS(iterate_green(f, FourierForm::single_mode(X, {1, 1}, {1, 0, 0, 0}, e), 5), Error);
}

TEST_CASE("Green current of the cat map") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto om = FourierForm::omega_power(X, 1);
  auto run = iterate_green(f, om, 14);
  CHECK(run.d_q == doctest::Approx(kD1));
  CHECK(run.m == 1);
  CHECK_FALSE(run.truncated);
  auto model = build_torus_cohomology(f);
  Eigen::VectorXd want = dominant_projection(model.M[1].values(), class_coordinates(om));
  CHECK((run.limit_class - want).norm() < 1e-12);
  CHECK(run.limit_distances[9] < 1e-9);
  CHECK(run.class_F_residual < 1e-12);
  CHECK(functional_equation_residual(f, run.limit, kD1) < 1e-8);

  auto S1 = om + bump(X, {1, 0, 0, 1}, 0.01);
  auto run1 = iterate_green(f, S1, 14);
  CHECK((run1.limit - run.limit).max_coefficient() < 1e-12);
  CHECK(run1.limit_distances.back() < 1e-9);
  CHECK(run1.fitted_rate > 0.0);
  CHECK(run1.fitted_rate <= 1.0 / std::sqrt(kD1));
  CHECK(run1.fitted_rate == doctest::Approx(1.0 / kD1).epsilon(0.05));

  // Linearity in the initial form.
  auto S2 = FourierForm::from_real_coordinates(X, 1, Eigen::Vector4d(1.0, 0.3, -0.2, 2.0));
  auto lin = iterate_green(f, 2.0 * S1 + 3.0 * S2, 14);
  auto b = iterate_green(f, S2, 14);
  CHECK((lin.limit - (2.0 * run1.limit + 3.0 * b.limit)).max_coefficient() < 1e-10);
}

TEST_CASE("Cesaro Green averages") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto om = FourierForm::omega_power(X, 1);
  auto it = iterate_green(f, om, 14);
  auto ce = cesaro_green(f, om, 40);
  CHECK((ce.limit - it.limit).max_coefficient() < 1e-9);
  CHECK(ce.class_F_residual < 1e-9);
  CHECK(ce.limit_distances.back() < ce.limit_distances.front());

  auto model = build_torus_cohomology(f);
  Eigen::EigenSolver<Eigen::MatrixXd> es(model.M[1].values());
  Eigen::Index i = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&i);
  CHECK(std::abs(es.eigenvalues()(i) - 1.0 / kD1) < 1e-9);
  Eigen::VectorXd low = es.eigenvectors().col(i).real();
  auto cl = cesaro_green(f, FourierForm::from_real_coordinates(X, 1, low), 20);
  CHECK(cl.limit_class.norm() < 1e-9);
  auto zero = cesaro_green(f, FourierForm(X, {1, 1}), 5);
  CHECK(zero.limit.max_coefficient() == 0.0);
}

TEST_CASE("uniqueness experiment") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto om = FourierForm::omega_power(X, 1);
  CHECK(uniqueness_experiment(f, om, om, 6).distance == 0.0);
  auto S1 = om + bump(X, {1, 1, 0, 0}, 0.02);
  auto r = uniqueness_experiment(f, om, S1, 12);
  CHECK(r.passed);
  CHECK(r.distance < 1e-7);
  auto S2 = om + FourierForm::from_real_coordinates(X, 1, Eigen::Vector4d(1, 0, 0, 0));
  CHECK_THROWS_WITH_AS(uniqueness_experiment(f, om, S2, 6), "class mismatch", Error);
  CHECK_THROWS_AS(uniqueness_experiment(f, om, om + bump(X, {1, 0, 0, 0}, 5.0), 6), Error);
}

TEST_CASE("equilibrium measure") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto om = FourierForm::omega_power(X, 1);
  auto Tp = iterate_green(f, om, 14).limit;
  auto Tm = iterate_green(f.inverse(), om, 14).limit;
  auto mu = equilibrium_measure(f, Tp, Tm, true);
  CHECK(mu.density.mode_count() == 1);
  CHECK(mu.mass > 0.0);
  CHECK(mu.invariant);
  CHECK(mu.invariance_residual < 1e-12);
  CHECK(mu.nonneg_certificate == doctest::Approx(mu.mass));
  auto model = build_torus_cohomology(f);
  double cup = class_coordinates(Tp).dot(model.P[1] * class_coordinates(Tm));
  CHECK(mu.mass == doctest::Approx(cup).epsilon(1e-12));
  auto scaled = equilibrium_measure(f, 2.0 * Tp, 3.0 * Tm);
  CHECK(scaled.mass == doctest::Approx(6.0 * mu.mass));
  auto z = equilibrium_measure(f, Tp, FourierForm(X, {1, 1}));
  CHECK(z.flag == "zero measure");
  CHECK_THROWS_AS(equilibrium_measure(f, Tp, FourierForm(X, {1, 1}), true), Error);
}

TEST_CASE("mixing correlations") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  MeasureDensity haar = equilibrium_measure(f, FourierForm::omega_power(X, 1), FourierForm::omega_power(X, 1));
  haar.density *= cd(1.0 / haar.mass, 0.0);
  haar.mass = 1.0;

  auto e = [&](const Mode& m) {
    Eigen::VectorXcd c(1);
    c(0) = 1.0;
    return FourierForm::single_mode(X, {0, 0}, m, c);
  };
  // Integer oracle: (B^T)^n m.
  const IntMatrix& B = f.B();
  auto step = [&](const Mode& m) {
    Mode out(4, 0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[i] += B(j, i) * m[j];
    return out;
  };
  Mode m{1, -1, 2, 0};
  Mode m3 = step(step(step(m)));
  Mode mp = negate(m3);
  auto run = mixing_correlations(haar, f, e(m), e(mp), 10);
  for (int n = 0; n <= 10; ++n) CHECK(run.C[n] == (n == 3 ? cd(1.0, 0.0) : cd(0.0, 0.0)));
  CHECK(run.n0 == 4);

  auto c = mixing_correlations(haar, f, FourierForm::cos_mode(X, zero_mode(2), 3.0), e(m), 6);
  CHECK(c.n0 == 0);

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(-2, 2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    FourierForm phi(X, {0, 0}), psi(X, {0, 0});
    for (int t = 0; t < 5; ++t) {
      Mode a(4), b(4);
      for (auto& v : a) v = d(rng);
      for (auto& v : b) v = d(rng);
      phi += FourierForm::cos_mode(X, a, g(rng));
      psi += FourierForm::sin_mode(X, b, g(rng));
    }
    auto r = mixing_correlations(haar, f, phi, psi, 12);
    CHECK(r.tail_zero);
    CHECK(r.n0 <= 8);
  }
}

TEST_CASE("moderate check") {
  auto X = std_torus(2);
  CHECK(half_systole(*X) == doctest::Approx(0.5));
  Eigen::VectorXd a(4);
  a << 0.1, 0.7, 0.3, 0.9;
  Eigen::VectorXd b(4);
  b << 0.95, 0.7, 0.3, 0.9;
  CHECK(torus_distance(*X, a, b) == doctest::Approx(0.15));
  auto f = cat_map(X);
  MeasureDensity haar = equilibrium_measure(f, FourierForm::omega_power(X, 1), FourierForm::omega_power(X, 1));
  LogSingularFunction u{a, 0.3, 1.0};
  auto rep = moderate_check(haar, {u}, {0.0, 0.5, 1.0, 2.5}, 200000, 7);
  REQUIRE(rep.cells.size() == 4);
  CHECK(rep.cells[0].value == doctest::Approx(1.0).epsilon(1e-12));
  LogSingularFunction scaled = u;
  scaled.scale = std::max(1.0, dsh_surrogate(*X, u));
  CHECK(scaled.scale >= 1.0);
  for (int t = 1; t <= 2; ++t) {
    double want = haar_exponential_integral(*X, scaled, rep.cells[t].lambda);
    CHECK(std::abs(rep.cells[t].value - want) <= 3.0 * rep.cells[t].std_error + 1e-12);
    CHECK_FALSE(rep.cells[t].inconclusive);
  }
  CHECK(rep.finite);
  CHECK(rep.lambda_max >= 1.0);
  CHECK(rep.bound >= 1.0);
  // Same seed, same numbers regardless of the worker count.
  auto again = moderate_check(haar, {u}, {0.5}, 20000, 7, 1);
  auto par = moderate_check(haar, {u}, {0.5}, 20000, 7, 4);
  CHECK(again.cells[0].value == par.cells[0].value);
  LogSingularFunction big{a, 0.6, 1.0};
  CHECK_THROWS_AS(moderate_check(haar, {big}, {0.5}, 100, 1), Error);
}

TEST_CASE("random positive perturbations") {
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto fam = random_positive_perturbations(X, 1, 4, 9);
  REQUIRE(fam.size() == 4);
  auto om = FourierForm::omega_power(X, 1);
  for (const auto& S : fam) {
    CHECK(positivity_constant(S, NormOptions{}) == 0.0);
    CHECK((class_coordinates(S) - class_coordinates(om)).norm() < 1e-14);
    CHECK(S.mode_count() > 1);
  }
  auto a = iterate_green(f, fam[0], 12), b = iterate_green(f, fam[3], 12);
  CHECK(c_minus_l(a.final_iterate - b.final_iterate, 2.0) < 1e-7);
  CHECK(uniqueness_experiment(f, fam[0], fam[3], 12).passed);
}
