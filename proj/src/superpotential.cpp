#include "kahlerdyn/superpotential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/error.hpp"

namespace kahlerdyn {

namespace {

// Matrix of dd^c on (r,r)-coefficients at mode m.
Eigen::MatrixXcd ddc_symbol(const std::shared_ptr<const Torus>& X, int r, const Mode& m) {
  const int k = X->k();
  const int n_in = covector_dim(k, {r, r});
  const int n_out = covector_dim(k, {r + 1, r + 1});
  Eigen::MatrixXcd D(n_out, n_in);
  for (int j = 0; j < n_in; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_in);
    e(j) = 1.0;
    D.col(j) = ddc(FourierForm::single_mode(X, {r, r}, m, e)).coefficient(m);
  }
  return D;
}

// Real pairing matrix of the constant g-bases in degrees p and k-p.
Eigen::MatrixXd g_pairing(const std::shared_ptr<const Torus>& X, int p) {
  const int k = X->k();
  const int a = static_cast<int>(binomial(k, p) * binomial(k, p));
  const int b = static_cast<int>(binomial(k, k - p) * binomial(k, k - p));
  Eigen::MatrixXd P(a, b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) {
      auto gi = FourierForm::from_real_coordinates(X, p, Eigen::VectorXd::Unit(a, i));
      auto gj = FourierForm::from_real_coordinates(X, k - p, Eigen::VectorXd::Unit(b, j));
      P(i, j) = pairing(gi, gj).real();
    }
  return P;
}

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

}  // namespace

NormalizationBasis::NormalizationBasis(std::vector<FourierForm> a) : alpha(std::move(a)) {
  if (alpha.empty()) throw Error("normalization basis is empty");
  const auto& X = alpha.front().torus();
  p = alpha.front().bidegree().p;
  const int kk = X->k();
  const int h_expected = static_cast<int>(binomial(kk, p) * binomial(kk, p));
  if (h() != h_expected) throw Error("normalization basis needs h = " + std::to_string(h_expected) + " forms");
  for (const auto& f : alpha) {
    if (f.bidegree() != Bidegree{p, p}) throw Error("normalization forms must share bidegree (p,p)");
    if (!f.torus()->same_as(*X)) throw Error("normalization forms live on different tori");
    if (!f.is_real(1e-10)) throw Error("normalization form is not real");
    if (d_residual(f) > 1e-9) throw Error("normalization form is not closed");
  }
  Eigen::MatrixXd C = class_matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-10 * s(0)) throw Error("normalization classes are dependent");
  Eigen::MatrixXd P = g_pairing(X, p);
  Eigen::MatrixXd Y = (C.transpose() * P).inverse();
  for (int j = 0; j < h(); ++j) alpha_dual.push_back(FourierForm::from_real_coordinates(X, kk - p, Y.col(j)));
}

NormalizationBasis NormalizationBasis::standard(std::shared_ptr<const Torus> torus, int p) {
  const int h = static_cast<int>(binomial(torus->k(), p) * binomial(torus->k(), p));
  std::vector<FourierForm> a;
  for (int i = 0; i < h; ++i) a.push_back(FourierForm::from_real_coordinates(torus, p, Eigen::VectorXd::Unit(h, i)));
  return NormalizationBasis(std::move(a));
}

NormalizationBasis NormalizationBasis::perturbed(const std::vector<FourierForm>& phi) const {
  if (phi.size() != alpha.size()) throw Error("one perturbation per basis form is required");
  std::vector<FourierForm> a = alpha;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (phi[i].bidegree() != Bidegree{p - 1, p - 1}) throw Error("perturbation must have bidegree (p-1,p-1)");
    a[i] += ddc(phi[i]);
  }
  return NormalizationBasis(std::move(a));
}

int NormalizationBasis::k() const { return torus()->k(); }

const std::shared_ptr<const Torus>& NormalizationBasis::torus() const {
  if (alpha.empty()) throw Error("normalization basis is empty");
  return alpha.front().torus();
}

Eigen::MatrixXd NormalizationBasis::class_matrix() const {
  Eigen::MatrixXd C(h(), h());
  for (int j = 0; j < h(); ++j) C.col(j) = class_coordinates(alpha[j]);
  return C;
}

Eigen::VectorXd NormalizationBasis::coordinates(const FourierForm& S) const {
  if (S.bidegree() != Bidegree{p, p}) throw Error("class coordinates need bidegree (p,p)");
  Eigen::VectorXd a(h());
  for (int i = 0; i < h(); ++i) a(i) = pairing(S, alpha_dual[i]).real();
  return a;
}

double NormalizationBasis::duality_defect() const {
  double d = 0.0;
  for (int i = 0; i < h(); ++i)
    for (int j = 0; j < h(); ++j)
      d = std::max(d, std::abs(pairing(alpha[i], alpha_dual[j]) - std::complex<double>(i == j ? 1.0 : 0.0, 0.0)));
  return d;
}

FourierForm solve_ddc(const FourierForm& R, const NormalizationBasis& basis) {
  const Bidegree b = R.bidegree();
  const int k = R.k();
  if (b.p != b.q || b.p < 1) throw Error("dd^c solve needs a (p,p)-form with p >= 1");
  if (basis.p != k - b.p + 1) throw Error("normalization basis has the wrong degree");
  const auto& X = R.torus();
  const double scale = R.max_coefficient();
  FourierForm U(X, {b.p - 1, b.p - 1});
  U.set_dropped(R.dropped_mass());
  if (scale == 0.0) return U;
  const Mode zero = zero_mode(k);
  if (R.coefficient(zero).norm() > 1e-12 * scale) throw Error("R has nonzero class");
  for (const auto& [m, c] : R.coefficients()) {
    if (m == zero) continue;
    Eigen::MatrixXcd D = ddc_symbol(X, b.p - 1, m);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(D);
    cod.setThreshold(1e-12);
    Eigen::VectorXcd u = cod.solve(c);
    if ((D * u - c).norm() > 1e-10 * scale) throw Error("R not dd^c-exact");
    U.add(m, u);
  }
  // Constant part fixing <U, alpha_i> = 0.
  Eigen::VectorXd a(basis.h());
  for (int i = 0; i < basis.h(); ++i) a(i) = pairing(U, basis.alpha[i]).real();
  for (int i = 0; i < basis.h(); ++i) {
    if (a(i) == 0.0) continue;
    U += (-a(i)) * basis.alpha_dual[i];
  }
  return U;
}

FourierForm solve_ddc(const FourierForm& R) {
  return solve_ddc(R, NormalizationBasis::standard(R.torus(), R.k() - R.bidegree().p + 1));
}

double superpotential_value(const FourierForm& S, const FourierForm& R, const NormalizationBasis& basis) {
  if (S.bidegree() != Bidegree{basis.p, basis.p}) throw Error("S must have the bidegree of the normalization basis");
  if (S.mode_count() == 0) return 0.0;
  return pairing(S, solve_ddc(R, basis)).real();
}

namespace {

void check_budget(const FourierForm& X, double reference, const FormConfig& cfg, int l) {
  if (X.dropped_mass() > cfg.drop_budget * std::max(reference, 1e-300))
    throw Error("truncation budget exceeded at l=" + std::to_string(l));
}

Eigen::MatrixXd action_in_basis(const TorusMap& f, const NormalizationBasis& basis, std::vector<FourierForm>& pulled,
                                const FormConfig& cfg) {
  Eigen::MatrixXd M(basis.h(), basis.h());
  pulled.clear();
  for (int j = 0; j < basis.h(); ++j) {
    pulled.push_back(pullback(f, basis.alpha[j], cfg));
    M.col(j) = basis.coordinates(pulled.back());
  }
  return M;
}

Eigen::VectorXd U_vector(const std::vector<FourierForm>& pulled, const FourierForm& X, const NormalizationBasis& basis) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(pulled.size()));
  if (X.mode_count() == 0) return Eigen::VectorXd::Zero(u.size());
  FourierForm U = solve_ddc(X, basis);
  for (std::size_t j = 0; j < pulled.size(); ++j) u(static_cast<Eigen::Index>(j)) = pairing(pulled[j], U).real();
  return u;
}

}  // namespace

SpIterate sp_iterate(const FourierForm& S, const TorusMap& f, int n, const FourierForm& R,
                     const NormalizationBasis& basis, const FormConfig& cfg) {
  if (n < 0) throw Error("n must be >= 0");
  SpIterate out;
  const double ref = R.coefficient_norm();
  FourierForm Sn = S;
  for (int i = 0; i < n; ++i) Sn = pullback(f, Sn, cfg);
  if (Sn.dropped_mass() > cfg.drop_budget * std::max(S.coefficient_norm(), 1e-300))
    throw Error("truncation budget exceeded in the direct pullback");
  out.direct = superpotential_value(Sn, R, basis);

  std::vector<FourierForm> pulled;
  const Eigen::MatrixXd M = action_in_basis(f, basis, pulled, cfg);
  const Eigen::VectorXd A = basis.coordinates(S);
  // Powers M^j A for j = 0..n-1.
  std::vector<Eigen::VectorXd> MA{A};
  for (int j = 1; j < n; ++j) MA.push_back(M * MA.back());
  FourierForm X = R;
  double abs_sum = 0.0;
  for (int l = 0; l < n; ++l) {
    check_budget(X, ref, cfg, l);
    double t = U_vector(pulled, X, basis).dot(MA[static_cast<std::size_t>(n - l - 1)]);
    out.terms.push_back(t);
    abs_sum += std::abs(t);
    X = pushforward(f, X, cfg);
  }
  check_budget(X, ref, cfg, n);
  double last = superpotential_value(S, X, basis);
  out.terms.push_back(last);
  abs_sum += std::abs(last);
  for (double t : out.terms) out.recursion += t;
  out.dropped = X.dropped_mass() + Sn.dropped_mass();
  out.scale = std::max(abs_sum, std::abs(out.direct));
  out.agree = std::abs(out.direct - out.recursion) <= 1e-6 * std::max(out.scale, 1e-12) + out.dropped;
  return out;
}

GreenSeries make_green_series(const TorusMap& f, const NormalizationBasis& basis, const Eigen::VectorXd& c,
                              std::optional<double> delta, const FormConfig& cfg) {
  if (c.size() != basis.h()) throw Error("class has wrong dimension");
  GreenSeries g;
  g.map = std::make_shared<TorusMap>(f);
  g.basis = basis;
  g.c = c;
  g.cfg = cfg;
  g.M = action_in_basis(f, basis, g.pulled_alpha, cfg);
  const int q = basis.p;
  DegreeProfile deg = dynamical_degrees(build_torus_cohomology(f));
  g.d_q = deg.degrees[static_cast<std::size_t>(q)];
  const double d_prev = q >= 1 ? deg.degrees[static_cast<std::size_t>(q - 1)] : 0.0;
  g.delta = delta ? *delta : std::sqrt(std::max(d_prev, 1e-300) * g.d_q);
  if (!(g.delta < g.d_q) || g.delta <= d_prev) throw Error("delta must lie in (d_{q-1}, d_q); series not summable");
  return g;
}

SeriesValue green_series_eval(const GreenSeries& series, const FourierForm& R, double tol, int max_terms) {
  if (!(series.delta < series.d_q)) throw Error("delta >= d_q: series not summable");
  SeriesValue out;
  if (series.c.norm() == 0.0 || R.mode_count() == 0) return out;
  const double rho = series.delta / series.d_q;
  // Terms vanish once every mode of Lambda^l R lies outside the radius of
  // alpha and f^* alpha; the envelope bound covers the rest.
  long long radius = 0;
  for (const auto& a : series.basis.alpha) radius = std::max(radius, a.radius());
  for (const auto& a : series.pulled_alpha) radius = std::max(radius, a.radius());
  const Eigen::MatrixXd Minv = series.M.inverse();
  Eigen::VectorXd v = Minv * series.c;
  FourierForm X = R;
  const double ref = R.coefficient_norm();
  double kappa = 0.0;
  for (int l = 0; l < max_terms; ++l) {
    check_budget(X, ref, series.cfg, l);
    double t = U_vector(series.pulled_alpha, X, series.basis).dot(v);
    out.value += t;
    out.terms_used = l + 1;
    kappa = std::max(kappa, std::abs(t) / std::pow(rho, l));
    out.kappa = kappa;
    out.tail_bound = kappa * std::pow(rho, l + 1) / (1.0 - rho);
    long long min_mode = std::numeric_limits<long long>::max();
    for (const auto& [m, c] : X.coefficients()) {
      long long r = 0;
      for (auto x : m) r = std::max(r, x < 0 ? -x : x);
      min_mode = std::min(min_mode, r);
    }
    if (out.tail_bound < tol && min_mode > radius) break;
    X = pushforward(*series.map, X, series.cfg);
    v = Minv * v;
  }
  return out;
}

double holder_exponent(double kappa, double rho) {
  if (!(kappa > 1.0)) throw Error("holder exponent needs kappa > 1");
  if (!(rho > 0.0 && rho < 1.0)) throw Error("holder exponent needs 0 < rho < 1");
  return -std::log(rho) / (std::log(kappa) - std::log(rho));
}

double fit_kappa(const TorusMap& f, const std::vector<FourierForm>& family, const FormConfig& cfg) {
  double k = 0.0;
  for (const auto& R : family) {
    double base = c_minus_l(R, 1.0);
    if (base == 0.0) continue;
    k = std::max(k, c_minus_l(pushforward(f, R, cfg), 1.0) / base);
  }
  return k;
}

double holder_fit(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> xs, ys;
  for (const auto& [x, u] : points) {
    if (x > 0 && std::abs(u) > 0) {
      xs.push_back(std::log(x));
      ys.push_back(std::log(std::abs(u)));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

double wedge_sp(const FourierForm& S, const FourierForm& S_prime, const FourierForm& Phi,
                const NormalizationBasis& basis, const FormConfig& cfg) {
  if (S_prime.mode_count() == 0) return 0.0;
  FourierForm PhiS = wedge(Phi, S_prime, cfg);
  FourierForm R = wedge(ddc(Phi), S_prime, cfg);
  double first = superpotential_value(S, R, basis);
  Eigen::VectorXd a = basis.coordinates(S);
  double second = 0.0;
  for (int i = 0; i < basis.h(); ++i) second += a(i) * pairing(basis.alpha[i], PhiS).real();
  return first + second;
}

std::vector<FourierForm> probe_family(std::shared_ptr<const Torus> torus, int p, int max_norm, int small_box,
                                      const NormOptions& opt) {
  (void)opt;
  const int k = torus->k();
  const int n = 2 * k;
  if (p < 1 || p > k) throw Error("probe family needs 1 <= p <= k");
  std::set<Mode> modes;
  auto add = [&](Mode m) {
    bool nonzero = false;
    for (auto v : m) nonzero = nonzero || v != 0;
    if (!nonzero) return;
    Mode neg = negate(m);
    if (modes.count(neg) == 0) modes.insert(m);
  };
  for (int j = 1; j <= max_norm; ++j) {
    for (int i = 0; i < n; ++i) {
      Mode m(static_cast<std::size_t>(n), 0);
      m[static_cast<std::size_t>(i)] = j;
      add(m);
    }
    add(Mode(static_cast<std::size_t>(n), j));
  }
  long long box = 2 * small_box + 1;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= box;
  for (long long idx = 0; idx < total; ++idx) {
    Mode m(static_cast<std::size_t>(n));
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      m[static_cast<std::size_t>(i)] = r % box - small_box;
      r /= box;
    }
    add(m);
  }
  const FourierForm om = FourierForm::omega_power(torus, k - p);
  const double om_mass = mass(FourierForm::omega_power(torus, k - p + 1));
  std::vector<FourierForm> out;
  NormOptions one{1, 1};
  for (const auto& m : modes) {
    FourierForm R = wedge(ddc(FourierForm::cos_mode(torus, m, 1.0)), om);
    // R = cos(2 pi m.x) H with H constant: the positivity constant is the
    // worse of +H and -H.
    FourierForm H = FourierForm::constant(torus, R.bidegree(), 2.0 * R.coefficient(m));
    double C = std::max(positivity_constant(H, one), positivity_constant(-1.0 * H, one));
    double star = 2.0 * C * om_mass;
    if (star <= 0.0) continue;
    out.push_back((1.0 / star) * R);
  }
  return out;
}

SweepResult main_estimate_sweep(const FourierForm& S, const std::vector<FourierForm>& family,
                                const NormalizationBasis& basis, const std::vector<FourierForm>& extension) {
  SweepResult r;
  auto ratio = [&](const FourierForm& R) {
    double u = std::abs(superpotential_value(S, R, basis));
    double c1 = c_l(R, 1.0);
    r.table.emplace_back(c1, u);
    return u / (1.0 + log_plus(c1));
  };
  for (const auto& R : family) r.c = std::max(r.c, ratio(R));
  r.c_extended = r.c;
  for (const auto& R : extension) r.c_extended = std::max(r.c_extended, ratio(R));
  r.stable = r.c_extended <= 2.0 * r.c || (r.c == 0.0 && r.c_extended == 0.0);
  return r;
}

}  // namespace kahlerdyn
