#include "doctest.h"

#include <cmath>
#include <random>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/superpotential.hpp"

using namespace kahlerdyn;
using cd = std::complex<double>;

namespace {

std::shared_ptr<const Torus> std_torus(int k) {
  auto spec = TorusSpec::standard(k, Eigen::MatrixXcd::Identity(k, k));
  return std::make_shared<Torus>(k, spec.lattice_basis);
}

TorusMap cat_map(std::shared_ptr<const Torus> X) {
  Eigen::MatrixXcd A(2, 2);
  A << 2, 1, 1, 1;
  return TorusMap(X, A, Eigen::VectorXcd::Zero(2));
}

Mode random_mode(int n, int radius, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-radius, radius);
  Mode m(static_cast<std::size_t>(n));
  do {
    for (auto& v : m) v = d(rng);
  } while (std::all_of(m.begin(), m.end(), [](long long v) { return v == 0; }));
  return m;
}

// Real function with a few random cosine and sine modes.
FourierForm random_function(std::shared_ptr<const Torus> X, int modes, int radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FourierForm f(X, {0, 0});
  for (int t = 0; t < modes; ++t) {
    Mode m = random_mode(2 * X->k(), radius, rng);
    f += FourierForm::cos_mode(X, m, g(rng));
    f += FourierForm::sin_mode(X, m, g(rng));
  }
  return f;
}

// Real (p,p)-form with random modes: phi * (random constant real form).
FourierForm random_real_form(std::shared_ptr<const Torus> X, int p, int modes, int radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int h = static_cast<int>(binomial(X->k(), p) * binomial(X->k(), p));
  FourierForm out(X, {p, p});
  for (int t = 0; t < modes; ++t) {
    Eigen::VectorXd coords(h);
    for (int i = 0; i < h; ++i) coords(i) = g(rng);
    out += wedge(random_function(X, 1, radius, rng), FourierForm::from_real_coordinates(X, p, coords));
  }
  return out;
}

NormalizationBasis perturbed_basis(std::shared_ptr<const Torus> X, int p, std::mt19937_64& rng, int radius = 2) {
  auto base = NormalizationBasis::standard(X, p);
  std::vector<FourierForm> phi;
  for (int i = 0; i < base.h(); ++i) phi.push_back(0.05 * random_real_form(X, p - 1, 2, radius, rng));
  return base.perturbed(phi);
}

}  // namespace

TEST_CASE("normalization basis") {
  auto X = std_torus(2);
  std::mt19937_64 rng(3);
  for (int p = 0; p <= 2; ++p) {
    auto b = NormalizationBasis::standard(X, p);
    CHECK(b.duality_defect() < 1e-12);
  }
  auto b = perturbed_basis(X, 1, rng);
  CHECK(b.duality_defect() < 1e-12);
  CHECK((b.class_matrix() - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
  std::vector<FourierForm> dep(4, FourierForm::omega_power(X, 1));
  CHECK_THROWS_AS(NormalizationBasis{dep}, Error);
}

TEST_CASE("solve_ddc") {
  std::mt19937_64 rng(11);
  auto X1 = std_torus(1);
  CHECK(solve_ddc(FourierForm(X1, {1, 1})).mode_count() == 0);

  // One dimension: dd^c cos is inverted to cos itself.
  auto c = FourierForm::cos_mode(X1, {1, 0}, 1.0);
  auto U = solve_ddc(ddc(c));
  CHECK((U - c).max_coefficient() < 1e-14);
  CHECK(U.coefficient(zero_mode(1)).norm() == 0.0);

  auto X = std_torus(2);
  for (int p = 0; p <= 1; ++p) {
    for (int trial = 0; trial < 5; ++trial) {
      FourierForm phi = random_real_form(X, p, 3, 3, rng);
      FourierForm R = ddc(phi);
      FourierForm V = solve_ddc(R);
      CHECK((ddc(V) - R).max_coefficient() < 1e-10 * R.max_coefficient());
      CHECK(V.is_real(1e-10));
      // The pairing against any closed form is independent of the kernel choice.
      FourierForm T = FourierForm::omega_power(X, 2 - p) + ddc(random_real_form(X, 1 - p, 2, 3, rng));
      CHECK(std::abs(pairing(T, V - phi)) < 1e-10 * std::max(1.0, phi.max_coefficient()));
    }
  }
  auto basis = perturbed_basis(X, 1, rng);
  FourierForm R = ddc(random_real_form(X, 0, 3, 2, rng));
  R = wedge(R, FourierForm::omega_power(X, 1));
  FourierForm V = solve_ddc(R, basis);
  for (int i = 0; i < basis.h(); ++i) CHECK(std::abs(pairing(V, basis.alpha[i])) < 1e-12);

  CHECK_THROWS_WITH_AS(solve_ddc(FourierForm::omega_power(X, 1)), "R has nonzero class", Error);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(4);
  e(1) = 1.0;
  CHECK_THROWS_WITH_AS(solve_ddc(FourierForm::single_mode(X, {1, 1}, {1, 0, 0, 0}, e)), "R not dd^c-exact", Error);
}

TEST_CASE("super-potential values") {
  std::mt19937_64 rng(5);
  auto X1 = std_torus(1);
  auto b1 = NormalizationBasis::standard(X1, 1);
  CHECK(superpotential_value(FourierForm::omega_power(X1, 1), ddc(FourierForm::cos_mode(X1, {2, 1}, 1.0)), b1) == 0.0);

  auto X = std_torus(2);
  auto basis = perturbed_basis(X, 1, rng);
  for (int i = 0; i < basis.h(); ++i) {
    FourierForm R = ddc(random_real_form(X, 1, 3, 2, rng));
    CHECK(std::abs(superpotential_value(basis.alpha[i], R, basis)) < 1e-12);
  }
  // Symmetry for zero-class S.
  for (int trial = 0; trial < 20; ++trial) {
    FourierForm S = ddc(random_real_form(X, 0, 3, 2, rng));
    FourierForm R = ddc(random_real_form(X, 1, 3, 2, rng));
    double a = superpotential_value(S, R, basis);
    double b = pairing(solve_ddc(S), R).real();
    CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("super-potential of the pullback: direct vs recursion") {
  std::mt19937_64 rng(17);
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto basis = perturbed_basis(X, 1, rng, 1);
  FourierForm om = FourierForm::omega_power(X, 1);
  // R shares modes with the perturbations so that the values are nonzero.
  FourierForm R(X, {2, 2});
  for (const auto& a : basis.alpha)
    for (const auto& [m, c] : a.coefficients())
      if (m != zero_mode(2)) R += wedge(ddc(FourierForm::cos_mode(X, m, 0.3)), om);
  auto r0 = sp_iterate(om, f, 0, R, basis);
  CHECK(r0.direct == doctest::Approx(r0.recursion).epsilon(1e-12));
  CHECK(r0.direct == doctest::Approx(superpotential_value(om, R, basis)));
  double largest = 0.0;
  for (int n = 1; n <= 6; ++n) {
    auto r = sp_iterate(om, f, n, R, basis);
    CHECK(r.agree);
    CHECK(std::abs(r.direct - r.recursion) <= 1e-6 * r.scale);
    largest = std::max(largest, std::abs(r.direct));
  }
  CHECK(largest > 1e-3);
  // n = 1, S = alpha_j: the recursion is U_j(R) + U_{alpha_j}(Lambda R), and the second term vanishes.
  auto r1 = sp_iterate(basis.alpha[2], f, 1, R, basis);
  CHECK(std::abs(r1.terms[1]) < 1e-12);
  CHECK(r1.direct == doctest::Approx(superpotential_value(pullback(f, basis.alpha[2]), R, basis)));
  CHECK(r1.agree);

  FormConfig tight;
  tight.box = 20;
  FourierForm Rhigh = wedge(ddc(FourierForm::cos_mode(X, {5, 0, 0, 0}, 1.0)), om);
  int first_out = 0;
  for (FourierForm Y = Rhigh; Y.radius() <= 20; Y = pushforward(f, Y)) ++first_out;
  CHECK_THROWS_WITH_AS(sp_iterate(om, f, 6, Rhigh, basis, tight),
                       ("truncation budget exceeded at l=" + std::to_string(first_out)).c_str(), Error);
}

TEST_CASE("Green series") {
  std::mt19937_64 rng(23);
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto basis = perturbed_basis(X, 1, rng, 1);
  auto model = build_torus_cohomology(f);
  SpectralProfile sp = compute_spectral_profile(model.M[1]);
  Eigen::VectorXd c = sp.H_basis.col(0);
  auto series = make_green_series(f, basis, c);
  const double d1 = (7.0 + 3.0 * std::sqrt(5.0)) / 2.0;
  CHECK(series.d_q == doctest::Approx(d1));
  CHECK(series.delta == doctest::Approx(std::sqrt(d1)));
  CHECK((series.M * c - d1 * c).norm() < 1e-9);

  FourierForm om = FourierForm::omega_power(X, 1);
  FourierForm T = FourierForm::from_real_coordinates(X, 1, basis.class_matrix() * c);
  for (const auto& a : basis.alpha) {
    for (const auto& [m, coef] : a.coefficients()) {
      if (m == zero_mode(2)) continue;
      FourierForm R = wedge(ddc(FourierForm::cos_mode(X, m, 1.0)), om);
      auto v = green_series_eval(series, R, 1e-12);
      double want = superpotential_value(T, R, basis);
      CHECK(std::abs(v.value - want) <= 2e-12 + 1e-9 * std::abs(want));
      CHECK(v.tail_bound < 1e-12);
    }
  }
  CHECK(green_series_eval(series, FourierForm(X, {2, 2})).value == 0.0);
  auto zero = make_green_series(f, basis, Eigen::VectorXd::Zero(4));
  CHECK(green_series_eval(zero, wedge(ddc(FourierForm::cos_mode(X, {1, 0, 0, 0}, 1.0)), om)).value == 0.0);
  CHECK_THROWS_AS(make_green_series(f, basis, c, d1 * 1.01), Error);
}

TEST_CASE("Hoelder exponent") {
  CHECK(holder_exponent(std::exp(1.0), std::exp(-1.0)) == doctest::Approx(0.5));
  CHECK(holder_exponent(2.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(holder_exponent(1.0, 0.5), Error);
  CHECK_THROWS_AS(holder_exponent(2.0, 1.0), Error);
  std::vector<std::pair<double, double>> pts;
  for (int i = 1; i <= 10; ++i) pts.emplace_back(std::pow(0.5, i), 3.0 * std::pow(0.5, 0.7 * i));
  pts.emplace_back(0.1, 0.0);
  CHECK(holder_fit(pts) == doctest::Approx(0.7));
  CHECK(std::isnan(holder_fit({{1.0, 1.0}})));

  auto X = std_torus(2);
  auto f = cat_map(X);
  auto fam = probe_family(X, 1, 4);
  double kappa = fit_kappa(f, fam);
  CHECK(kappa > 1.0);
  const double d1 = (7.0 + 3.0 * std::sqrt(5.0)) / 2.0;
  double lam = holder_exponent(kappa, 1.0 / std::sqrt(d1));
  CHECK(lam > 0.0);
  CHECK(lam < 1.0);
}

TEST_CASE("wedge through super-potentials") {
  std::mt19937_64 rng(29);
  auto X = std_torus(2);
  auto f = cat_map(X);
  auto basis = perturbed_basis(X, 1, rng);
  FourierForm om = FourierForm::omega_power(X, 1);
  FourierForm fom = pullback(f, om);
  fom = (1.0 / mass(fom)) * fom;
  for (int trial = 0; trial < 10; ++trial) {
    FourierForm S = fom + ddc(0.1 * random_function(X, 2, 2, rng));
    FourierForm Sp = om + ddc(0.1 * random_function(X, 2, 2, rng));
    FourierForm Phi = random_function(X, 2, 2, rng);
    double a = wedge_sp(S, Sp, Phi, basis);
    double b = pairing(wedge(S, Sp), Phi).real();
    CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)));
    // Classes multiply exactly.
    Eigen::VectorXd cls = class_coordinates(wedge(S, Sp));
    Eigen::VectorXd cup = class_coordinates(wedge(harmonic_part(S), harmonic_part(Sp)));
    CHECK((cls - cup).norm() <= 1e-12 * std::max(1.0, cup.norm()));
    CHECK(std::abs(wedge_sp(S, Sp, Phi, basis) - wedge_sp(Sp, S, Phi, basis)) <= 1e-6 * std::max(1.0, std::abs(b)));
  }
  FourierForm Phi = random_function(X, 2, 2, rng);
  CHECK(wedge_sp(basis.alpha[0], om, Phi, basis) ==
        doctest::Approx(pairing(wedge(basis.alpha[0], om), Phi).real()));
  CHECK(wedge_sp(om, FourierForm(X, {1, 1}), Phi, basis) == 0.0);
}

TEST_CASE("probe family and the logarithmic estimate") {
  std::mt19937_64 rng(31);
  auto X = std_torus(2);
  auto basis = NormalizationBasis::standard(X, 1);
  auto fam = probe_family(X, 1, 16);
  for (const auto& R : fam) {
    CHECK(R.bidegree() == Bidegree{2, 2});
    auto rep = norms(R, {});
    CHECK(rep.star_surrogate <= 1.0 + 1e-9);
  }
  FourierForm om = FourierForm::omega_power(X, 1);
  FourierForm S = om;
  for (int j = 1; j <= 16; j *= 2) S += ddc(FourierForm::cos_mode(X, {j, 0, 0, 0}, 0.1 / (j * j)));
  auto ext = probe_family(X, 1, 160, 0);
  auto sw = main_estimate_sweep(S, fam, basis, ext);
  CHECK(sw.c > 0.0);
  CHECK(std::isfinite(sw.c));
  CHECK(sw.stable);
  CHECK(main_estimate_sweep(S, {FourierForm(X, {2, 2})}, basis).c == 0.0);

  // Same class, same super-potential values on the family: same form.
  FourierForm S2 = S + ddc(FourierForm::cos_mode(X, {1, 1, 0, 0}, 0.01));
  double diff = 0.0;
  for (const auto& R : fam)
    diff = std::max(diff, std::abs(superpotential_value(S, R, basis) - superpotential_value(S2, R, basis)));
  CHECK(diff > 1e-6);
}
