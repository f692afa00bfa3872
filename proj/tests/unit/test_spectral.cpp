#include "doctest.h"

#include <cmath>
#include <random>

#include "kahlerdyn/error.hpp"
#include "kahlerdyn/spectral.hpp"

using namespace kahlerdyn;

namespace {

RealMatrix exact_from(std::initializer_list<std::initializer_list<long long>> rows) {
  ExactMatrix m;
  for (auto r : rows) {
    std::vector<Rational> row;
    for (auto v : r) row.emplace_back(v);
    m.push_back(row);
  }
  return RealMatrix(m);
}

double dist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("characteristic polynomial and determinant") {
  auto cp = characteristic_polynomial(exact_from({{2, 1}, {1, 1}}).exact());
  CHECK(cp == RationalPolynomial({Rational(1), Rational(-3), Rational(1)}));

  ExactMatrix half = {{Rational(1, 2), Rational(1, 3)}, {Rational(0), Rational(3)}};
  auto cph = characteristic_polynomial(half);
  // (x - 1/2)(x - 3)
  CHECK(cph == RationalPolynomial({Rational(3, 2), Rational(-7, 2), Rational(1)}));

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 1 + trial % 5;
    ExactMatrix m(n, std::vector<Rational>(n));
    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int v = d(rng);
        m[i][j] = v;
        f(i, j) = v;
      }
    double det = exact_determinant(m).convert_to<double>();
    CHECK(det == doctest::Approx(f.determinant()).epsilon(1e-9));
    // Cayley-Hamilton on the float shadow.
    auto p = characteristic_polynomial(m);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int i = p.degree(); i >= 0; --i) acc = acc * f + p[i].convert_to<double>() * Eigen::MatrixXd::Identity(n, n);
    CHECK(acc.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("square-free decomposition") {
  // (x-1)^2 (x^2 - 7x + 1)
  RationalPolynomial a({Rational(-1), Rational(1)});
  RationalPolynomial b({Rational(1), Rational(-7), Rational(1)});
  auto f = square_free_decomposition(a * a * b);
  REQUIRE(f.size() == 2);
  CHECK(f[0].multiplicity == 1);
  CHECK(f[0].factor == b);
  CHECK(f[1].multiplicity == 2);
  CHECK(f[1].factor == a);
  auto roots = square_free_roots(b);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].real() == doctest::Approx((7 + 3 * std::sqrt(5.0)) / 2).epsilon(1e-14));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("12") == Rational(12));
  CHECK(format_rational(Rational(-4, 6)) == "-2/3");
  CHECK(parse_rational("4/-6") == Rational(-2, 3));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("x"));
}

TEST_CASE("profile: identity") {
  auto L = RealMatrix::identity(2);
  auto p = compute_spectral_profile(L);
  CHECK(p.spectral_radius == doctest::Approx(1.0));
  CHECK(p.multiplicity_m == 1);
  CHECK(p.H_basis.cols() == 2);
  CHECK(p.nu() == 1);
  CHECK(p.theta[0] == 0.0);
  CHECK(p.theta_group.kind == ThetaGroup::Kind::Finite);
  CHECK(p.theta_group.order == 1);
  CHECK(dist(normalized_iterate(L, p, 37), Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
  CHECK(dist(cesaro_operator(L, p, 11), Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
  auto pr = limit_projector(L, p, 1e-10, 512);
  CHECK(pr.converged);
  CHECK(dist(pr.projector, Eigen::MatrixXd::Identity(2, 2)) < 1e-12);
  CHECK(pr.residual < 1e-12);
}

TEST_CASE("profile: Jordan block J_{2,2}") {
  auto L = exact_from({{2, 1}, {0, 2}});
  auto p = compute_spectral_profile(L);
  CHECK(p.spectral_radius == doctest::Approx(2.0));
  CHECK(p.multiplicity_m == 2);
  REQUIRE(p.eigenvalues.size() == 1);
  CHECK(p.eigenvalues[0].jordan_sizes == std::vector<int>{2});
  REQUIRE(p.H_basis.cols() == 1);
  CHECK(std::abs(p.H_basis(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(p.H_basis(1, 0)) < 1e-12);
  // J^n = [[2^n, n 2^{n-1}], [0, 2^n]].
  auto it = normalized_iterate(L, p, 10);
  Eigen::MatrixXd expect(2, 2);
  expect << 0.1, 0.5, 0.0, 0.1;
  CHECK(dist(it, expect) < 1e-13);
  // Cesaro limit: top-right entry 1/((m-1)! lambda^{m-1}) = 1/2.
  auto pr = limit_projector(L, p, 1e-9, 4096);
  Eigen::MatrixXd pj(2, 2);
  pj << 0.0, 0.5, 0.0, 0.0;
  CHECK(pr.converged);
  CHECK(dist(pr.projector, pj) < 1e-7);
  CHECK(pr.rank == 1);
  CHECK(pr.equivariance_residual < 1e-6);
}

TEST_CASE("profile: rotation by a quarter turn") {
  auto L = exact_from({{0, -2}, {2, 0}});
  auto p = compute_spectral_profile(L);
  CHECK(p.spectral_radius == doctest::Approx(2.0));
  CHECK(p.multiplicity_m == 1);
  REQUIRE(p.nu() == 2);
  CHECK(p.theta[0] == doctest::Approx(M_PI / 2));
  CHECK(p.theta[1] == doctest::Approx(-M_PI / 2));
  CHECK(p.theta_group.kind == ThetaGroup::Kind::Finite);
  CHECK(p.theta_group.order == 4);
  CHECK(p.F_basis.cols() == 2);
  CHECK(p.H_basis.cols() == 0);
  auto pr = limit_projector(L, p, 1e-10, 1024);
  CHECK(pr.projector.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(pr.rank == 0);
  // Subsequences n = r mod 4 are constant.
  CHECK(dist(normalized_iterate(L, p, 5), normalized_iterate(L, p, 9)) < 1e-12);
}

TEST_CASE("normalized iterate and Cesaro on diagonal matrices") {
  auto L = exact_from({{3, 0}, {0, 1}});
  auto p = compute_spectral_profile(L);
  Eigen::MatrixXd expect(2, 2);
  expect << 1.0, 0.0, 0.0, std::pow(3.0, -5);
  CHECK(dist(normalized_iterate(L, p, 5), expect) < 1e-15);

  auto D = exact_from({{2, 0}, {0, 1}});
  auto pd = compute_spectral_profile(D);
  auto c = cesaro_operator(D, pd, 20);
  double geo = 0;
  for (int n = 1; n <= 20; ++n) geo += std::pow(2.0, -n);
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(c(1, 1) == doctest::Approx(geo / 20));
  auto pr = limit_projector(D, pd, 1e-10, 512);
  Eigen::MatrixXd pj(2, 2);
  pj << 1.0, 0.0, 0.0, 0.0;
  CHECK(pr.converged);
  CHECK(dist(pr.projector, pj) < 1e-9);
  CHECK(pr.N_used <= 512);
}

TEST_CASE("normalized iterate survives overflow of lambda^n") {
  auto L = exact_from({{2, 1}, {1, 1}});
  auto p = compute_spectral_profile(L);
  auto a = normalized_iterate(L, p, 4000);
  auto b = normalized_iterate(L, p, 4001);
  CHECK(std::isfinite(a(0, 0)));
  CHECK(dist(a, b) < 1e-10);
}

TEST_CASE("theta group classification") {
  CHECK(classify_theta({0.0}, 50).order == 1);
  auto g = classify_theta({M_PI / 2, -M_PI / 2}, 50);
  CHECK(g.kind == ThetaGroup::Kind::Finite);
  CHECK(g.order == 4);
  auto t = classify_theta({std::fmod(2 * M_PI * std::sqrt(2.0), 2 * M_PI)}, 50);
  CHECK(t.kind == ThetaGroup::Kind::Torus);
  CHECK(t.torus_rank == 1);
  CHECK(t.description == "torus rank 1 (up to bound)");
  auto pair = classify_theta({2 * M_PI * (std::sqrt(2.0) - 1), -2 * M_PI * (std::sqrt(2.0) - 1)}, 50);
  CHECK(pair.torus_rank == 1);
  auto noisy = classify_theta({2 * M_PI * (1.0 / 3 + 1e-9)}, 50);
  CHECK(noisy.kind == ThetaGroup::Kind::Undetermined);
}

TEST_CASE("singular input is rejected") {
  CHECK_THROWS_WITH_AS(compute_spectral_profile(exact_from({{1, 2}, {2, 4}})), "not an automorphism action", Error);
  Eigen::MatrixXd f(2, 2);
  f << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(compute_spectral_profile(RealMatrix(f)), Error);
}

TEST_CASE("profile invariants on random integer matrices") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-3, 3);
  int tested = 0;
  while (tested < 25) {
    int n = 2 + tested % 4;
    ExactMatrix m(n, std::vector<Rational>(n));
    for (auto& row : m)
      for (auto& e : row) e = d(rng);
    if (exact_determinant(m) == 0) continue;
    ++tested;
    RealMatrix L(m);
    auto p = compute_spectral_profile(L);
    std::complex<double> prod = 1;
    int alg = 0;
    for (const auto& c : p.eigenvalues) {
      int js = 0;
      for (int s : c.jordan_sizes) js += s;
      CHECK(js == c.algebraic);
      alg += c.algebraic;
      for (int i = 0; i < c.algebraic; ++i) prod *= c.value;
    }
    CHECK(alg == n);
    double det = exact_determinant(m).convert_to<double>();
    CHECK(std::abs(prod - det) <= 1e-9 * std::abs(det));
    // L restricted to H is lambda times identity.
    if (p.H_basis.cols() > 0 && p.multiplicity_m == 1) {
      Eigen::MatrixXd r = L.values() * p.H_basis - p.spectral_radius * p.H_basis;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-8 * p.spectral_radius);
    }
    // H inside F.
    Eigen::MatrixXd out = p.H_basis - span_projector(p.F_basis) * p.H_basis;
    if (out.size()) CHECK(out.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("limit projector against a similarity oracle") {
  // L = S J S^{-1} with J = J_2(3) (+) [3] (+) [-1]; P_J has a single 1/3 at the top block corner.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J(0, 0) = 3; J(0, 1) = 1; J(1, 1) = 3;
  J(2, 2) = 3;
  J(3, 3) = -1;
  Eigen::MatrixXd S(4, 4);
  S << 1, 1, 0, 0,
       0, 1, 1, 0,
       1, 0, 1, 1,
       0, 0, 1, 2;
  Eigen::MatrixXd Si = S.inverse();
  Eigen::MatrixXd Lf = S * J * Si;
  auto snapped = integral_snap(Lf * 3.0, 1e-9);  // keep exact path available
  ExactMatrix ex(4, std::vector<Rational>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ex[i][j] = Rational(snapped->exact()[i][j]) / 3;
  RealMatrix L(ex);
  auto p = compute_spectral_profile(L);
  CHECK(p.multiplicity_m == 2);
  CHECK(p.spectral_radius == doctest::Approx(3.0));
  Eigen::MatrixXd PJ = Eigen::MatrixXd::Zero(4, 4);
  PJ(0, 1) = 1.0 / 3.0;
  Eigen::MatrixXd oracle = S * PJ * Si;
  auto pr = limit_projector(L, p, 1e-9, 8192);
  CHECK(pr.converged);
  CHECK(dist(pr.projector, oracle) < 1e-6);
  CHECK(pr.image_residual < 1e-6);
  CHECK(pr.rank == 1);
}
