#include "doctest.h"

#include <cmath>
#include <random>

#include "kahlerdyn/error.hpp"
#include "kahlerdyn/forms.hpp"

using namespace kahlerdyn;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd cat_map() {
  Eigen::MatrixXcd A(2, 2);
  A << 2, 1, 1, 1;
  return A;
}

std::shared_ptr<const Torus> std_torus(int k) {
  auto spec = TorusSpec::standard(k, Eigen::MatrixXcd::Identity(k, k));
  return std::make_shared<Torus>(k, spec.lattice_basis);
}

FourierForm random_form(std::shared_ptr<const Torus> X, Bidegree b, int modes, int radius, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mi(-radius, radius);
  std::normal_distribution<double> g;
  FourierForm f(X, b);
  for (int t = 0; t < modes; ++t) {
    Mode m(2 * X->k());
    for (auto& v : m) v = mi(rng);
    Eigen::VectorXcd c(f.dim());
    for (int i = 0; i < f.dim(); ++i) c(i) = cd(g(rng), g(rng));
    f.add(m, c);
  }
  return f;
}

double max_abs(const FourierForm& f) { return f.max_coefficient(); }

}  // namespace

TEST_CASE("torus map induces an integral matrix") {
  TorusMap f(TorusSpec::standard(2, cat_map()));
  IntMatrix expect = IntMatrix::Zero(4, 4);
  expect << 2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 2, 1, 0, 0, 1, 1;
  CHECK(f.B() == expect);
  CHECK(integer_determinant(f.B()) == 1);
  TorusMap g = f.inverse();
  CHECK((f.B() * g.B()) == IntMatrix::Identity(4, 4));

  Eigen::MatrixXcd bad(2, 2);
  bad << 1, 0.5, 0, 1;
  CHECK_THROWS_WITH_AS(TorusMap(TorusSpec::standard(2, bad)), "not an automorphism of the torus", Error);
  Eigen::MatrixXcd endo(2, 2);
  endo << 2, 0, 0, 1;
  CHECK_THROWS_WITH_AS(TorusMap(TorusSpec::standard(2, endo)), "not an automorphism of the torus", Error);

  // Hexagonal lattice Z[w] with w = exp(i pi/3): multiplication by w is an automorphism.
  TorusSpec hex;
  hex.k = 1;
  cd w(0.5, std::sqrt(3.0) / 2);
  hex.lattice_basis = {Eigen::VectorXcd::Constant(1, 1.0), Eigen::VectorXcd::Constant(1, w)};
  hex.A = Eigen::MatrixXcd::Constant(1, 1, w);
  hex.translation = Eigen::VectorXcd::Zero(1);
  TorusMap h(hex);
  CHECK(std::abs(integer_determinant(h.B())) == 1);
}

TEST_CASE("top integral and omega powers") {
  auto X = std_torus(2);
  auto om = FourierForm::omega_power(X, 1);
  auto om2 = wedge(om, om);
  // (i/2 dz1 dzb1) ^ (i/2 dz2 dzb2) = 1/4 dz12 dzb12; omega^2 = 2 times that volume form.
  CHECK(std::abs(om2.coefficient(zero_mode(2))(0) - cd(0.5, 0)) < 1e-15);
  CHECK(std::abs(pairing(om, om) - cd(2.0, 0)) < 1e-14);
  auto X1 = std_torus(1);
  CHECK(mass(FourierForm::omega_power(X1, 1)) == doctest::Approx(1.0));
  CHECK(mass(FourierForm::omega_power(X, 2)) == doctest::Approx(2.0));
  auto X3 = std_torus(3);
  CHECK(mass(FourierForm::omega_power(X3, 3)) == doctest::Approx(6.0));
}

TEST_CASE("wedge of functions multiplies characters") {
  auto X = std_torus(2);
  Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
  auto a = FourierForm::single_mode(X, {0, 0}, {1, 0, 2, 0}, one);
  auto b = FourierForm::single_mode(X, {0, 0}, {0, -1, 1, 3}, 2.0 * one);
  auto c = wedge(a, b);
  CHECK(c.mode_count() == 1);
  CHECK(std::abs(c.coefficient({1, -1, 3, 3})(0) - cd(2, 0)) < 1e-15);
  auto z = wedge(a, FourierForm(X, {1, 1}));
  CHECK(z.mode_count() == 0);
}

TEST_CASE("wedge is graded commutative and associative") {
  std::mt19937_64 rng(3);
  auto X = std_torus(3);
  auto a = random_form(X, {1, 0}, 3, 2, rng);
  auto b = random_form(X, {0, 1}, 3, 2, rng);
  auto c = random_form(X, {1, 1}, 2, 2, rng);
  auto ab = wedge(a, b), ba = wedge(b, a);
  CHECK(max_abs(ab + ba) <= 1e-12 * max_abs(ab));
  auto ac = wedge(a, c), ca = wedge(c, a);
  CHECK(max_abs(ac - ca) <= 1e-12 * max_abs(ac));
  auto l = wedge(wedge(a, b), c), r = wedge(a, wedge(b, c));
  CHECK(max_abs(l - r) <= 1e-12 * max_abs(l));
  CHECK_THROWS_AS(wedge(FourierForm(X, {2, 2}), FourierForm(X, {2, 0})), Error);
}

TEST_CASE("ddc against finite differences") {
  // Non-rectangular lattice in C^2 to exercise the derivative symbol.
  TorusSpec s;
  s.k = 2;
  s.lattice_basis = {(Eigen::VectorXcd(2) << 1.0, 0.0).finished(), (Eigen::VectorXcd(2) << cd(0.3, 0.1), 1.0).finished(),
                     (Eigen::VectorXcd(2) << cd(0.2, 1.1), 0.0).finished(), (Eigen::VectorXcd(2) << 0.0, cd(0.4, 0.9)).finished()};
  auto X = std::make_shared<Torus>(2, s.lattice_basis);
  auto u = FourierForm::cos_mode(X, {1, 0, -1, 2}, 0.7) + FourierForm::sin_mode(X, {0, 1, 1, 0}, 0.4);
  auto R = ddc(u);
  CHECK(R.is_real());
  // u as a function of y = (Re z, Im z).
  auto u_at = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = X->Lr_inv() * y;
    return u.evaluate(x)(0).real();
  };
  Eigen::VectorXd y0(4);
  y0 << 0.13, -0.41, 0.27, 0.05;
  const double h = 1e-4;
  auto second = [&](int a, int b) {
    Eigen::VectorXd ea = Eigen::VectorXd::Zero(4), eb = Eigen::VectorXd::Zero(4);
    ea(a) = h;
    eb(b) = h;
    return (u_at(y0 + ea + eb) - u_at(y0 + ea - eb) - u_at(y0 - ea + eb) + u_at(y0 - ea - eb)) / (4 * h * h);
  };
  Eigen::VectorXcd got = R.evaluate(X->Lr_inv() * y0);
  for (int l = 0; l < 2; ++l)
    for (int j = 0; j < 2; ++j) {
      // d^2/dz_l dzbar_j = 1/4 (d_al - i d_bl)(d_aj + i d_bj); ddc = (i/pi) del delbar.
      cd mixed = 0.25 * (second(l, j) + second(2 + l, 2 + j) + cd(0, 1) * (second(l, 2 + j) - second(2 + l, j)));
      cd expect = cd(0, 1.0 / M_PI) * mixed;
      CHECK(std::abs(got(l * 2 + j) - expect) < 1e-5);
    }
}

TEST_CASE("ddc single mode on k = 1") {
  auto X = std_torus(1);
  const double a = 0.3;
  Mode m{2, -1};
  auto R = ddc(FourierForm::single_mode(X, {0, 0}, m, Eigen::VectorXcd::Constant(1, a)));
  // xi = (m1 - i m2)/2, coefficient -4 pi i a |xi|^2 = -i pi a |m|^2.
  CHECK(std::abs(R.coefficient(m)(0) - cd(0, -M_PI * a * 5)) < 1e-13);
  double c2 = c_minus_l(R, 2.0);
  CHECK(c2 == doctest::Approx(M_PI * a * 5 / std::pow(1 + std::sqrt(5.0), 2)).epsilon(1e-14));
  CHECK(ddc(FourierForm::omega_power(X, 1)).mode_count() == 0);
  CHECK(ddc(FourierForm::constant(X, {0, 0}, Eigen::VectorXcd::Ones(1))).max_coefficient() == 0.0);
}

TEST_CASE("d o d vanishes") {
  std::mt19937_64 rng(5);
  auto X = std_torus(3);
  for (Bidegree b : {Bidegree{0, 0}, Bidegree{1, 0}, Bidegree{1, 1}, Bidegree{0, 2}}) {
    auto F = random_form(X, b, 4, 3, rng);
    double scale = max_abs(F) * std::pow(2 * M_PI * 10, 2);
    CHECK(max_abs(del(del(F))) <= 1e-12 * scale);
    CHECK(max_abs(delbar(delbar(F))) <= 1e-12 * scale);
    if (b.p + 1 <= 3 && b.q + 1 <= 3) CHECK(max_abs(del(delbar(F)) + delbar(del(F))) <= 1e-12 * scale);
  }
  auto u = random_form(X, {0, 0}, 4, 3, rng);
  auto R = ddc(u);
  CHECK(d_residual(R) < 1e-12);
  CHECK(max_abs(ddc(R)) <= 1e-12 * max_abs(R) * std::pow(2 * M_PI * 10, 2));
}

TEST_CASE("pullback and pushforward") {
  auto spec = TorusSpec::standard(2, cat_map());
  TorusMap f(spec);
  auto X = f.torus();
  CHECK(X->same_as(*std_torus(2)));
  std::mt19937_64 rng(9);
  auto F = random_form(X, {1, 1}, 5, 3, rng);
  auto G = random_form(X, {1, 1}, 5, 3, rng);

  TorusMap id(TorusSpec::standard(2, Eigen::MatrixXcd::Identity(2, 2)));
  CHECK(max_abs(pullback(id, F) - F) == 0.0);

  // Translation: unit phases, norms unchanged.
  Eigen::VectorXcd b(2);
  b << cd(0.25, 0.1), cd(-0.3, 0.7);
  TorusMap tr(TorusSpec::standard(2, Eigen::MatrixXcd::Identity(2, 2), b));
  auto T = pullback(tr, F);
  CHECK(T.coefficient_norm() == doctest::Approx(F.coefficient_norm()).epsilon(1e-14));
  for (const auto& [m, c] : F.coefficients()) {
    double ph = 2 * M_PI * (m[0] * 0.25 + m[1] * -0.3 + m[2] * 0.1 + m[3] * 0.7);
    CHECK((T.coefficient(m) - std::exp(cd(0, ph)) * c).norm() < 1e-12);
  }

  // Pairing invariance under an automorphism with translation.
  TorusMap ft(TorusSpec::standard(2, cat_map(), b));
  auto Fp = pullback(ft, F), Gp = pullback(ft, G);
  CHECK(std::abs(pairing(Fp, Gp) - pairing(F, G)) < 1e-9 * std::max(1.0, std::abs(pairing(F, G))));
  CHECK(max_abs(pushforward(ft, Fp) - F) < 1e-12);

  // Constant omega: covector action only; mass matches cohomological pairing.
  auto om = FourierForm::omega_power(X, 1);
  auto fom = pullback(f, om);
  CHECK(fom.mode_count() == 1);
  // f^* omega = (i/2) sum (A^T conj(A))_{..}; <f^* omega, omega> = (1/2)|A|_F^2 * (int of i/2 dz dzb ^ i/2 dz dzb terms).
  double frob = cat_map().squaredNorm();
  CHECK(pairing(fom, om).real() == doctest::Approx(frob).epsilon(1e-12));
}

TEST_CASE("pullback drops modes outside the box") {
  TorusMap f(TorusSpec::standard(2, cat_map()));
  auto X = f.torus();
  FormConfig cfg;
  cfg.box = 10;
  auto F = FourierForm::single_mode(X, {0, 0}, {4, 4, 0, 0}, Eigen::VectorXcd::Constant(1, 2.0));
  auto P = pullback(f, F, cfg);
  CHECK(P.mode_count() == 0);
  CHECK(P.dropped_mass() == doctest::Approx(2.0));
}

TEST_CASE("harmonic part and classes") {
  auto X = std_torus(2);
  auto om = FourierForm::omega_power(X, 1);
  auto F = om + ddc(FourierForm::cos_mode(X, {1, 0, 0, 1}, 0.2));
  auto h = harmonic_part(F);
  CHECK(max_abs(h - om) < 1e-15);
  Eigen::VectorXd cls = class_coordinates(F);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(4);
  // omega = (i/2)(dz1 dzb1 + dz2 dzb2) = (1/2)(f_11 + f_22).
  expect(0) = 0.5;
  expect(3) = 0.5;
  CHECK((cls - expect).norm() < 1e-15);
  CHECK(class_coordinates(ddc(FourierForm::cos_mode(X, {0, 1, 0, 0}, 1.0))).norm() == 0.0);
  CHECK_THROWS_WITH_AS(harmonic_part(FourierForm::cos_mode(X, {1, 0, 0, 0}, 1.0)), "form is not closed", Error);
  auto back = FourierForm::from_real_coordinates(X, 1, expect);
  CHECK(max_abs(back - om) < 1e-15);
}

TEST_CASE("real basis round trip") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 1; k <= 3; ++k)
    for (int p = 0; p <= k; ++p) {
      auto T = real_basis_matrix(k, p);
      Eigen::VectorXd c(T.cols());
      for (auto& v : c) v = g(rng);
      Eigen::VectorXcd raw = T * c.cast<cd>();
      CHECK((real_coordinates(k, p, raw) - c).norm() < 1e-13);
      auto X = std_torus(k);
      CHECK(FourierForm::constant(X, {p, p}, raw).is_real());
    }
}

TEST_CASE("norm report") {
  auto X = std_torus(1);
  auto om = FourierForm::omega_power(X, 1);
  auto r = norms(om, {1.0, 2.0});
  CHECK(r.positivity_constant == 0.0);
  CHECK(r.star_surrogate == doctest::Approx(r.mass));
  auto z = norms(FourierForm(X, {1, 1}), {1.0});
  CHECK(z.mass == 0.0);
  CHECK(z.star_surrogate == 0.0);
  CHECK(z.c_l[0].second == 0.0);
  CHECK(z.c_minus_l[0].second == 0.0);

  // omega + ddc(a cos 2 pi x_1): h = 1/2 - pi a cos, so C = 2 pi a - 1 (grid contains x = 0).
  const double a = 1.0 / M_PI;
  auto F = om + ddc(FourierForm::cos_mode(X, {1, 0}, a));
  auto rf = norms(F, {2.0});
  CHECK(rf.positivity_constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rf.star_surrogate == doctest::Approx(rf.mass + 2.0));

  // k = 2, p = 2 density check and p = 0.
  auto X2 = std_torus(2);
  auto top = FourierForm::omega_power(X2, 2);
  CHECK(positivity_constant(top, {}) == 0.0);
  CHECK(positivity_constant(-1.0 * top, {}) == doctest::Approx(1.0));
  auto fn = FourierForm::cos_mode(X2, {1, 0, 0, 0}, 3.0);
  CHECK(positivity_constant(fn, {}) == doctest::Approx(3.0));

  // c_minus_l is monotone in l.
  std::mt19937_64 rng(2);
  auto G = random_form(X2, {1, 1}, 6, 5, rng);
  CHECK(c_minus_l(G, 2.0) <= c_minus_l(G, 1.0));
}

TEST_CASE("interpolation of surrogate norms") {
  auto X = std::make_shared<Torus>(2, TorusSpec::standard(2, Eigen::MatrixXcd::Identity(2, 2)).lattice_basis);
  // One mode with coefficient norm a: c_{-l} / c_{-l'}^{l/l'} = a^{1 - l/l'} for every mode.
  for (long long r : {1, 3, 9}) {
    auto F = ddc(FourierForm::cos_mode(X, {r, 0, 1, 0}, 0.7));
    const double a = F.coefficient({r, 0, 1, 0}).norm();
    CHECK(interpolation_constant({F}, 1.0, 2.0) == doctest::Approx(std::sqrt(a)).epsilon(1e-12));
  }
  auto fam = star_bounded_family(X, 1, 20, 1.0, 3);
  for (const auto& F : fam) CHECK(norms(F, {}, {8, 1LL << 16}).star_surrogate == doctest::Approx(1.0));
  auto fit = interpolation_check(X, 1, 1.0, 2.0, 1.0, 20, 3);
  CHECK(fit.lower_holds);
  CHECK(fit.c > 0.0);
  CHECK(fit.drift >= 1.0);
  CHECK(fit.stable);
  CHECK_THROWS_AS(interpolation_constant(fam, 2.0, 1.0), Error);
}
