#include "kahlerdyn/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kahlerdyn/covector.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/rng.hpp"

namespace kahlerdyn {

namespace {

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  const int ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  if (a.is_exact() && b.is_exact()) {
    ExactMatrix out(ar * br, std::vector<Rational>(ac * bc));
    for (int i = 0; i < ar; ++i)
      for (int j = 0; j < ac; ++j)
        for (int r = 0; r < br; ++r)
          for (int s = 0; s < bc; ++s) out[i * br + r][j * bc + s] = a.exact()[i][j] * b.exact()[r][s];
    return RealMatrix(std::move(out));
  }
  Eigen::MatrixXd out(ar * br, ac * bc);
  for (int i = 0; i < ar; ++i)
    for (int j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a.values()(i, j) * b.values();
  return RealMatrix(out);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RealMatrix block_diagonal(const std::vector<RealMatrix>& blocks) {
  int n = 0;
  bool exact = true;
  for (const auto& b : blocks) {
    n += b.rows();
    exact = exact && b.is_exact();
  }
  if (exact) {
    ExactMatrix out(n, std::vector<Rational>(n, Rational(0)));
    int at = 0;
    for (const auto& b : blocks) {
      for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) out[at + i][at + j] = b.exact()[i][j];
      at += b.rows();
    }
    return RealMatrix(std::move(out));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  int at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b.values();
    at += b.rows();
  }
  return RealMatrix(out);
}

RealMatrix inverse_of(const RealMatrix& m) {
  if (!m.is_exact()) return RealMatrix(Eigen::MatrixXd(m.values().inverse()));
  const int n = m.rows();
  ExactMatrix a = m.exact();
  ExactMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw Error("not an automorphism action");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    Rational s = a[c][c];
    for (int j = 0; j < n; ++j) {
      a[c][j] /= s;
      inv[c][j] /= s;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return RealMatrix(std::move(inv));
}

double op_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// log <M^n c, P w> for n = 0..n_max, computed with a renormalized vector.
std::vector<double> log_pairings(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, const Eigen::VectorXd& Pw,
                                 int n_max) {
  std::vector<double> out;
  Eigen::VectorXd v = c;
  double lg = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      v = M * v;
      double s = v.cwiseAbs().maxCoeff();
      if (s > 0) {
        v /= s;
        lg += std::log(s);
      }
    }
    double val = v.dot(Pw);
    out.push_back(val > 0 ? lg + std::log(val) : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace

void CohomologyModel::validate() const {
  const auto n = static_cast<std::size_t>(k + 1);
  if (k < 1) throw Error("model dimension k must be >= 1");
  if (M.size() != n || P.size() != n || omega_class.size() != n) throw Error("model needs k+1 entries per field");
  for (int q = 0; q <= k; ++q) {
    const auto& m = M[q];
    if (!m.is_square()) throw Error("M_" + std::to_string(q) + " is not square");
    if (P[q].rows() != h(q) || P[q].cols() != h(k - q))
      throw Error("P_" + std::to_string(q) + " has wrong shape");
    if (omega_class[q].size() != h(q)) throw Error("omega class " + std::to_string(q) + " has wrong size");
  }
  if (h(0) != 1 || h(k) != 1) throw Error("h_0 and h_k must be 1");
  for (int q : {0, k})
    if (std::abs(M[q].values()(0, 0) - 1.0) > 1e-12) throw Error("M_0 and M_k must be [1]");
  for (int q = 0; q <= k; ++q) {
    if (P[q].rows() != P[q].cols()) throw Error("pairing is degenerate at q=" + std::to_string(q));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P[q]);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-12 * std::max(1.0, s(0))) throw Error("pairing is degenerate at q=" + std::to_string(q));
  }
}

CohomologyModel build_torus_cohomology(const TorusMap& f) {
  const int k = f.k();
  CohomologyModel model;
  model.k = k;
  const auto& X = *f.torus();
  for (int q = 0; q <= k; ++q) {
    Eigen::MatrixXcd T = real_basis_matrix(k, q);
    Eigen::MatrixXcd K = covector_pullback_matrix(f.A(), {q, q});
    Eigen::MatrixXcd Mc = T.inverse() * K * T;
    const double scale = std::max(1.0, Mc.cwiseAbs().maxCoeff());
    if (Mc.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) throw Error("torus action is not real in the g-basis");
    Eigen::MatrixXd Mr = Mc.real();
    auto snapped = integral_snap(Mr, 1e-9 * scale);
    model.M.push_back(snapped ? *snapped : RealMatrix(Mr));

    Eigen::MatrixXcd Td = real_basis_matrix(k, k - q);
    Eigen::MatrixXd P(T.cols(), Td.cols());
    for (Eigen::Index a = 0; a < T.cols(); ++a)
      for (Eigen::Index b = 0; b < Td.cols(); ++b) {
        Eigen::VectorXcd top = wedge_covectors(k, {q, q}, T.col(a), {k - q, k - q}, Td.col(b));
        P(a, b) = (top(0) * X.top_integral()).real();
      }
    model.P.push_back(P);
    model.omega_class.push_back(real_coordinates(k, q, omega_power_covector(k, q)));
  }
  model.label = "torus";
  return model;
}

CohomologyModel build_torus_cohomology(const TorusSpec& spec) { return build_torus_cohomology(TorusMap(spec)); }

CohomologyModel inverse_model(const CohomologyModel& model) {
  CohomologyModel inv = model;
  for (auto& m : inv.M) m = inverse_of(m);
  inv.label = model.label + "^-1";
  return inv;
}

CohomologyModel kunneth_product(const CohomologyModel& x, const CohomologyModel& y) {
  CohomologyModel out;
  out.k = x.k + y.k;
  out.label = x.label + " x " + y.label;
  auto blocks_of = [&](int q) {
    std::vector<int> as;
    for (int a = std::max(0, q - y.k); a <= std::min(q, x.k); ++a) as.push_back(a);
    return as;
  };
  for (int q = 0; q <= out.k; ++q) {
    std::vector<RealMatrix> mb;
    std::vector<Eigen::VectorXd> wb;
    for (int a : blocks_of(q)) {
      const int b = q - a;
      mb.push_back(kron(x.M[a], y.M[b]));
      Eigen::VectorXd w = kron(Eigen::MatrixXd(x.omega_class[a]), Eigen::MatrixXd(y.omega_class[b]));
      wb.push_back(static_cast<double>(binomial(q, a)) * w);
    }
    out.M.push_back(block_diagonal(mb));
    Eigen::Index n = 0;
    for (const auto& w : wb) n += w.size();
    Eigen::VectorXd w(n);
    Eigen::Index at = 0;
    for (const auto& v : wb) {
      w.segment(at, v.size()) = v;
      at += v.size();
    }
    out.omega_class.push_back(w);
  }
  for (int q = 0; q <= out.k; ++q) {
    const int qd = out.k - q;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(out.h(q), out.h(qd));
    // Offsets of block a inside H^q and of block a' inside H^{k-q}.
    auto offset = [&](int deg, int a) {
      int off = 0;
      for (int t : blocks_of(deg)) {
        if (t == a) return off;
        off += x.h(t) * y.h(deg - t);
      }
      throw Error("kunneth block not found");
    };
    for (int a : blocks_of(q)) {
      const int b = q - a;
      const int ad = x.k - a;
      Eigen::MatrixXd blk = kron(x.P[a], y.P[b]);
      P.block(offset(q, a), offset(qd, ad), blk.rows(), blk.cols()) = blk;
    }
    out.P.push_back(P);
  }
  return out;
}

TorusSpec product_torus_spec(const TorusSpec& x, const TorusSpec& y) {
  TorusSpec s;
  s.k = x.k + y.k;
  for (const auto& v : x.lattice_basis) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(s.k);
    w.head(x.k) = v;
    s.lattice_basis.push_back(w);
  }
  for (const auto& v : y.lattice_basis) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(s.k);
    w.tail(y.k) = v;
    s.lattice_basis.push_back(w);
  }
  s.A = Eigen::MatrixXcd::Zero(s.k, s.k);
  s.A.topLeftCorner(x.k, x.k) = x.A;
  s.A.bottomRightCorner(y.k, y.k) = y.A;
  s.translation = Eigen::VectorXcd::Zero(s.k);
  if (x.translation.size() == x.k) s.translation.head(x.k) = x.translation;
  if (y.translation.size() == y.k) s.translation.tail(y.k) = y.translation;
  return s;
}

TorusSpec random_automorphism_spec(int k, std::uint64_t seed, int moves) {
  CounterRng rng(seed, 0x70727573ULL);
  const std::complex<double> units[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(k, k);
  for (int t = 0; t < moves; ++t) {
    if (k == 1) {
      A(0, 0) *= units[rng.integer(0, 3)];
      continue;
    }
    int i = static_cast<int>(rng.integer(0, k - 1));
    int j = static_cast<int>(rng.integer(0, k - 2));
    if (j >= i) ++j;
    long long kind = rng.integer(0, 5);
    if (kind == 0) {
      A.row(i) *= units[rng.integer(0, 3)];
    } else {
      // Real shears dominate so that most samples have nontrivial degrees.
      std::complex<double> c = kind <= 3 ? units[rng.integer(0, 1)] : units[rng.integer(0, 3)];
      A.row(i) += c * A.row(j);
    }
  }
  return TorusSpec::standard(k, A);
}

DegreeProfile degree_profile_from(const std::vector<double>& degrees, double tol) {
  DegreeProfile d;
  d.degrees = degrees;
  d.tol = tol;
  d.multiplicity.assign(degrees.size(), 1);
  double best = 0.0;
  for (double v : degrees) best = std::max(best, v);
  d.p = -1;
  for (std::size_t q = 0; q < degrees.size(); ++q) {
    if (degrees[q] >= best * (1.0 - tol)) {
      if (d.p < 0) d.p = static_cast<int>(q);
      d.p_prime = static_cast<int>(q);
    }
  }
  d.entropy = best > 0 ? std::log(best) : 0.0;
  return d;
}

DegreeProfile dynamical_degrees(const CohomologyModel& model, double tol, int limit_n) {
  model.validate();
  std::vector<double> deg;
  std::vector<int> mult;
  for (int q = 0; q <= model.k; ++q) {
    SpectralProfile sp = compute_spectral_profile(model.M[q], tol);
    deg.push_back(sp.spectral_radius);
    mult.push_back(sp.multiplicity_m);
  }
  DegreeProfile d = degree_profile_from(deg, tol);
  d.multiplicity = mult;
  for (int q = 0; q <= model.k; ++q) {
    Eigen::VectorXd Pw = model.P[q] * model.omega_class[model.k - q];
    auto logs = log_pairings(model.M[q].values(), model.omega_class[q], Pw, limit_n);
    double est = std::exp(logs[limit_n] / limit_n);
    d.limit_estimate.push_back(est);
    d.limit_n.push_back(limit_n);
    d.limit_gap.push_back(std::abs(est - deg[q]));
  }
  return d;
}

ConcavityVerdict check_log_concavity(const DegreeProfile& profile, double tol) {
  const auto& d = profile.degrees;
  const int k = static_cast<int>(d.size()) - 1;
  if (k < 1) throw Error("need at least two degrees");
  if (std::abs(d[0] - 1.0) > tol || std::abs(d[k] - 1.0) > tol) throw Error("d_0 = d_k = 1 violated");
  for (int q = 1; q < k; ++q) {
    if (d[q] * d[q] < d[q - 1] * d[q + 1] * (1.0 - tol)) throw Error("log-concavity violated at q=" + std::to_string(q));
  }
  return {profile.p, profile.p_prime};
}

DualityResult duality_check(const CohomologyModel& model, int q, double tol) {
  model.validate();
  if (q < 0 || q > model.k) throw Error("degree out of range");
  const Eigen::MatrixXd& P = model.P[q];
  const int qd = model.k - q;
  RealMatrix N = inverse_of(model.M[qd]);
  Eigen::MatrixXd Pinv = P.inverse();
  DualityResult r;
  r.q = q;
  r.pushforward_in_dual_basis = P * N.values() * Pinv;
  r.residual = op_norm(Eigen::MatrixXd(r.pushforward_in_dual_basis - model.M[q].values().transpose()));
  SpectralProfile a = compute_spectral_profile(model.M[q], tol);
  SpectralProfile b = compute_spectral_profile(N, tol);
  r.radius_match = std::abs(a.spectral_radius - b.spectral_radius) <= 1e-9 * std::max(1.0, a.spectral_radius);
  r.multiplicity_match = a.multiplicity_m == b.multiplicity_m;
  return r;
}

double mixing_mass(const CohomologyModel& model, int p, double d_p, int m, long long N) {
  const Eigen::MatrixXd step = model.M[p].values() / d_p;
  const Eigen::VectorXd Pw = model.P[p] * model.omega_class[model.k - p];
  std::vector<double> g(static_cast<std::size_t>(2 * N + 1), 0.0);
  Eigen::VectorXd v = model.omega_class[p];
  for (long long s = 1; s <= 2 * N; ++s) {
    v = step * v;
    g[s] = v.dot(Pw);
  }
  std::vector<double> w(static_cast<std::size_t>(N + 1));
  for (long long n = 1; n <= N; ++n) w[n] = std::pow(static_cast<double>(n), 1.0 - m);
  double total = 0.0;
  for (long long n = 1; n <= N; ++n) {
    double row = 0.0;
    for (long long l = 1; l <= N; ++l) row += w[l] * g[n + l];
    total += w[n] * row;
  }
  return total / (static_cast<double>(N) * static_cast<double>(N));
}

MixingReport mixing_criterion(const CohomologyModel& model, long long N_max, long long N_decay, double tol) {
  DegreeProfile deg = dynamical_degrees(model, tol);
  MixingReport r;
  r.p = deg.p;
  if (deg.p < deg.p_prime) {
    r.hypotheses_met = false;
    r.note = "theorem hypotheses not met";
  }
  const int p = deg.p;
  const int kp = model.k - p;
  SpectralProfile a = compute_spectral_profile(model.M[p], tol);
  SpectralProfile b = compute_spectral_profile(inverse_of(model.M[kp]), tol);
  r.multiplicity = a.multiplicity_m;
  r.cond2 = a.multiplicity_m == 1;
  r.cond3 = b.multiplicity_m == 1;
  r.equivalent = r.cond2 == r.cond3;

  const double d = a.spectral_radius;
  const int m = a.multiplicity_m;
  r.floor = std::numeric_limits<double>::infinity();
  {
    // Incremental double sum for N = 1..N_max.
    const Eigen::MatrixXd step = model.M[p].values() / d;
    const Eigen::VectorXd Pw = model.P[p] * model.omega_class[kp];
    std::vector<double> g(static_cast<std::size_t>(2 * N_max + 1), 0.0);
    Eigen::VectorXd v = model.omega_class[p];
    for (long long s = 1; s <= 2 * N_max; ++s) {
      v = step * v;
      g[s] = v.dot(Pw);
    }
    auto w = [&](long long n) { return std::pow(static_cast<double>(n), 1.0 - m); };
    double S = 0.0;
    for (long long N = 1; N <= N_max; ++N) {
      // Add the new row and column n = N or l = N.
      double add = w(N) * w(N) * g[2 * N];
      for (long long j = 1; j < N; ++j) add += 2.0 * w(N) * w(j) * g[N + j];
      S += add;
      double val = S / (static_cast<double>(N) * static_cast<double>(N));
      r.mass_series.emplace_back(N, val);
      r.floor = std::min(r.floor, val);
    }
  }
  const long long half = std::max<long long>(1, N_decay / 2);
  const double s_half = mixing_mass(model, p, d, m, half);
  const double s_full = mixing_mass(model, p, d, m, N_decay);
  r.decay_points = {{half, s_half}, {N_decay, s_full}};
  r.fitted_limit = 2.0 * s_full - s_half;
  r.fitted_rate = (s_half > 0 && s_full > 0) ? std::log(s_full / s_half) / std::log(static_cast<double>(N_decay) / half)
                                              : std::numeric_limits<double>::quiet_NaN();
  r.bounded_below = r.floor > 0 && r.fitted_limit > 0 && std::abs(r.fitted_rate) < 0.1;
  return r;
}

MassGrowth mass_growth(const CohomologyModel& model, int q, const Eigen::VectorXd& class_S, int n_min, int n_max,
                       double tol) {
  if (n_min < 1 || n_max < n_min + 2) throw Error("mass growth needs at least three values of n >= 1");
  if (class_S.size() != model.h(q)) throw Error("class has wrong dimension");
  SpectralProfile sp = compute_spectral_profile(model.M[q], 1e-9);
  MassGrowth g;
  g.q = q;
  g.expected_rate = std::log(sp.spectral_radius);
  g.expected_poly = sp.multiplicity_m - 1;
  Eigen::VectorXd Pw = model.P[q] * model.omega_class[model.k - q];
  auto logs = log_pairings(model.M[q].values(), class_S, Pw, n_max);
  std::vector<int> ns;
  std::vector<double> ys;
  for (int n = n_min; n <= n_max; ++n) {
    g.log_masses.emplace_back(n, logs[n]);
    if (std::isfinite(logs[n])) {
      ns.push_back(n);
      ys.push_back(logs[n]);
    }
  }
  if (ns.size() < 3) throw Error("mass sequence is not positive");
  Eigen::MatrixXd X(ns.size(), 3);
  Eigen::VectorXd y(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(static_cast<double>(ns[i]));
    X(i, 2) = ns[i];
    y(i) = ys[i];
  }
  Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
  g.log_kappa = c(0);
  g.poly_degree = c(1);
  g.growth_rate = c(2);
  g.rate_ok = std::abs(g.growth_rate - g.expected_rate) <= tol * std::max(1.0, g.expected_rate);
  g.poly_ok = std::abs(g.poly_degree - g.expected_poly) <= 0.2;
  return g;
}

}  // namespace kahlerdyn
