#include "kahlerdyn/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/rng.hpp"
#include "kahlerdyn/spectral.hpp"

namespace kahlerdyn {

namespace {

struct Gate {
  int q = 0;
  int m = 1;
  double d_q = 1.0;
  RealMatrix M;
  SpectralProfile profile;
};

Gate gate(const TorusMap& f, const FourierForm& S0) {
  const Bidegree b = S0.bidegree();
  if (b.p != b.q || b.p < 1) throw Error("S0 must be a (q,q)-form with q >= 1");
  if (d_residual(S0) > 1e-9) throw Error("S0 is not closed");
  CohomologyModel model = build_torus_cohomology(f);
  DegreeProfile deg = dynamical_degrees(model);
  const auto q = static_cast<std::size_t>(b.p);
  if (!(deg.degrees[q - 1] < deg.degrees[q] * (1.0 - deg.tol))) throw Error("d_{q-1} < d_q violated");
  Gate g{b.p, deg.multiplicity[q], deg.degrees[q], model.M[q], compute_spectral_profile(model.M[q])};
  return g;
}

double fit_geometric_rate(const std::vector<double>& d, double floor) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > floor) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log(d[i]));
    }
  }
  if (xs.size() < 2) return 0.0;
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
  return std::exp(sxy / sxx);
}

double subspace_residual(const Eigen::VectorXd& c, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return c.norm();
  return (c - basis * (basis.transpose() * c)).norm();
}

// Normalized pullbacks S_1..S_n; stops early when the truncation budget is hit.
std::vector<FourierForm> normalized_pullbacks(const TorusMap& f, const FourierForm& S0, const Gate& g, int n_max,
                                              const FormConfig& cfg, bool& truncated) {
  std::vector<FourierForm> out;
  truncated = false;
  const double budget = cfg.drop_budget * std::max(S0.coefficient_norm(), 1e-300);
  FourierForm S = S0;
  for (int n = 1; n <= n_max; ++n) {
    FourierForm P = pullback(f, S, cfg);
    if (P.dropped_mass() > budget) {
      truncated = true;
      break;
    }
    double s = 1.0 / g.d_q;
    if (n >= 2 && g.m > 1) s *= std::pow(static_cast<double>(n - 1) / n, g.m - 1);
    P *= std::complex<double>(s, 0.0);
    S = P;
    out.push_back(S);
  }
  if (out.empty()) throw Error("truncation budget exceeded at n=1");
  return out;
}

}  // namespace

IterationRun iterate_green(const TorusMap& f, const FourierForm& S0, int n_max, const FormConfig& cfg) {
  if (n_max < 1) throw Error("n_max must be >= 1");
  Gate g = gate(f, S0);
  IterationRun run(f.spec(), S0);
  run.q = g.q;
  run.m = g.m;
  run.d_q = g.d_q;
  auto S = normalized_pullbacks(f, S0, g, n_max, cfg, run.truncated);
  run.n_used = static_cast<int>(S.size());
  run.dropped_mass_total = S.back().dropped_mass();
  run.final_iterate = S.back();
  run.limit = harmonic_part(S.back(), 1e-8);
  run.limit.set_dropped(0.0);
  for (std::size_t i = 1; i < S.size(); ++i) run.step_distances.push_back(c_minus_l(S[i] - S[i - 1], 2.0));
  for (const auto& s : S) run.limit_distances.push_back(c_minus_l(s - run.limit, 2.0));
  run.limit_class = class_coordinates(run.limit);
  run.class_F_residual = subspace_residual(run.limit_class, g.profile.F_basis);
  run.fitted_rate = fit_geometric_rate(run.limit_distances, 1e-13 * std::max(1.0, run.limit.max_coefficient()));
  return run;
}

IterationRun cesaro_green(const TorusMap& f, const FourierForm& S0, int N_max, const FormConfig& cfg) {
  if (N_max < 1) throw Error("N_max must be >= 1");
  Gate g = gate(f, S0);
  IterationRun run(f.spec(), S0);
  run.q = g.q;
  run.m = g.m;
  run.d_q = g.d_q;
  auto S = normalized_pullbacks(f, S0, g, N_max, cfg, run.truncated);
  run.n_used = static_cast<int>(S.size());
  ProjectorResult P = limit_projector(g.M, g.profile, 1e-12, 4096);
  Eigen::VectorXd cls = P.projector * class_coordinates(S0);
  run.limit = FourierForm::from_real_coordinates(S0.torus(), g.q, cls);
  run.limit_class = cls;
  run.class_F_residual = subspace_residual(cls, g.profile.H_basis);
  FourierForm sum(S0.torus(), S0.bidegree());
  FourierForm prev(S0.torus(), S0.bidegree());
  for (std::size_t N = 1; N <= S.size(); ++N) {
    sum += S[N - 1];
    FourierForm avg = (1.0 / static_cast<double>(N)) * sum;
    if (N >= 2) run.step_distances.push_back(c_minus_l(avg - prev, 2.0));
    run.limit_distances.push_back(c_minus_l(avg - run.limit, 2.0));
    run.final_iterate = avg;
    prev = avg;
  }
  run.dropped_mass_total = S.back().dropped_mass();
  run.fitted_rate = fit_geometric_rate(run.limit_distances, 1e-13 * std::max(1.0, run.limit.max_coefficient()));
  return run;
}

UniquenessResult uniqueness_experiment(const TorusMap& f, const FourierForm& S0, const FourierForm& S0_prime, int n_max,
                                       const FormConfig& cfg) {
  Eigen::VectorXd a = class_coordinates(S0), b = class_coordinates(S0_prime);
  if ((a - b).norm() > 1e-12 * std::max(1.0, a.norm())) throw Error("class mismatch");
  NormOptions opt;
  if (positivity_constant(S0, opt) > 0.0) throw Error("S0 is not positive");
  if (positivity_constant(S0_prime, opt) > 0.0) throw Error("S0' is not positive");
  Gate g = gate(f, S0);
  bool t1 = false, t2 = false;
  auto A = normalized_pullbacks(f, S0, g, n_max, cfg, t1);
  auto B = normalized_pullbacks(f, S0_prime, g, n_max, cfg, t2);
  const std::size_t n = std::min(A.size(), B.size());
  UniquenessResult r;
  r.distance = c_minus_l(A[n - 1] - B[n - 1], 2.0);
  r.limit_distance = c_minus_l(harmonic_part(A[n - 1], 1e-8) - harmonic_part(B[n - 1], 1e-8), 2.0);
  r.passed = r.distance < 1e-7;
  return r;
}

std::vector<FourierForm> random_positive_perturbations(std::shared_ptr<const Torus> torus, int q, std::size_t count,
                                                       std::uint64_t seed, double amplitude, int max_mode,
                                                       int terms) {
  const int k = torus->k();
  if (q < 1 || q > k) throw Error("q out of range");
  const FourierForm base = FourierForm::omega_power(torus, q);
  NormOptions opt;
  std::vector<FourierForm> out;
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    FourierForm phi(torus, {q - 1, q - 1});
    for (int t = 0; t < terms; ++t) {
      Mode m(static_cast<std::size_t>(2 * k));
      bool nonzero = false;
      while (!nonzero) {
        for (auto& v : m) v = rng.integer(-max_mode, max_mode);
        nonzero = std::any_of(m.begin(), m.end(), [](long long v) { return v != 0; });
      }
      FourierForm c = FourierForm::cos_mode(torus, m, rng.uniform(-1.0, 1.0));
      for (int j = 1; j < q; ++j) c = wedge(c, FourierForm::omega_power(torus, 1));
      phi += c;
    }
    const FourierForm bump = ddc(phi);
    double a = amplitude / std::max(1e-300, bump.max_coefficient());
    FourierForm S = base + a * bump;
    for (int tries = 0; tries < 60 && positivity_constant(S, opt) > 0.0; ++tries) {
      a *= 0.5;
      S = base + a * bump;
    }
    out.push_back(S);
  }
  return out;
}

double functional_equation_residual(const TorusMap& f, const FourierForm& T, double d_q) {
  FourierForm img = pullback(f, T);
  img *= std::complex<double>(1.0 / d_q, 0.0);
  return (img - T).max_coefficient();
}

double MeasureDensity::value(const Eigen::VectorXd& x) const {
  return (density.evaluate(x)(0) * density.torus()->top_integral()).real();
}

MeasureDensity equilibrium_measure(const TorusMap& f, const FourierForm& T_plus, const FourierForm& T_minus,
                                   bool criterion_holds) {
  const int k = T_plus.k();
  if (T_plus.bidegree().p + T_minus.bidegree().p != k) throw Error("T_plus and T_minus must have complementary degrees");
  MeasureDensity mu(wedge(T_plus, T_minus));
  mu.mass = mass(mu.density);
  if (mu.density.max_coefficient() == 0.0) {
    mu.flag = "zero measure";
    if (criterion_holds) throw Error("zero mass although the mixing criterion holds");
    mu.invariant = true;
    return mu;
  }
  if (criterion_holds && !(mu.mass > 0.0)) throw Error("zero mass although the mixing criterion holds");
  // Grid minimum of the density.
  const int n = 2 * k;
  int g = 16;
  while (g > 1 && std::pow(static_cast<double>(g), n) > 65536.0) --g;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= g;
  double lo = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      x(i) = static_cast<double>(r % g) / g;
      r /= g;
    }
    lo = std::min(lo, mu.value(x));
  }
  mu.nonneg_certificate = lo;
  mu.invariance_residual = (pullback(f, mu.density) - mu.density).max_coefficient();
  mu.invariant = mu.invariance_residual < 1e-8 * std::max(1.0, std::abs(mu.mass));
  return mu;
}

CorrelationRun mixing_correlations(const MeasureDensity& mu, const TorusMap& f, const FourierForm& phi,
                                   const FourierForm& psi, int n_max, const FormConfig& cfg) {
  if (phi.bidegree() != Bidegree{0, 0} || psi.bidegree() != Bidegree{0, 0})
    throw Error("observables must be functions");
  if (!(mu.mass > 0.0)) throw Error("measure has zero mass");
  const int k = phi.k();
  const Mode zero = zero_mode(k);
  const bool haar = mu.density.mode_count() == 1 && mu.density.coefficients().count(zero) == 1;
  auto centered = [&](const FourierForm& g) {
    FourierForm out = g;
    Eigen::VectorXcd mean(1);
    mean(0) = haar ? g.coefficient(zero)(0) : pairing(mu.density, g) / mu.mass;
    out.add(zero, -mean);
    return out;
  };
  FourierForm a = centered(phi);
  const FourierForm b = centered(psi);
  CorrelationRun run;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) a = pullback(f, a, cfg);
    run.C.push_back(pairing(mu.density, wedge(a, b, cfg)));
  }
  int n0 = static_cast<int>(run.C.size());
  while (n0 > 0 && run.C[static_cast<std::size_t>(n0 - 1)] == std::complex<double>(0.0, 0.0)) --n0;
  run.tail_zero = n0 <= n_max;
  run.n0 = run.tail_zero ? n0 : -1;
  return run;
}

double torus_distance(const Torus& X, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = X.real_dim();
  const Eigen::MatrixXd& L = X.Lr();
  thread_local std::vector<double> d, s;
  d.resize(static_cast<std::size_t>(n));
  s.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[i] = x(i) - y(i);
    d[i] -= std::round(d[i]);
  }
  auto length = [&](const std::vector<double>& v) {
    double t = 0.0;
    for (int r = 0; r < n; ++r) {
      double c = 0.0;
      for (int j = 0; j < n; ++j) c += L(r, j) * v[j];
      t += c * c;
    }
    return std::sqrt(t);
  };
  bool orthogonal = true;
  for (int a = 0; a < n && orthogonal; ++a)
    for (int b = a + 1; b < n && orthogonal; ++b) orthogonal = std::abs(L.col(a).dot(L.col(b))) <= 1e-14;
  if (orthogonal) return length(d);
  // Skewed lattice: check the neighbouring translates.
  double best = std::numeric_limits<double>::infinity();
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      s[i] = d[i] + static_cast<double>(r % 3 - 1);
      r /= 3;
    }
    best = std::min(best, length(s));
  }
  return best;
}

double half_systole(const Torus& X) {
  const int n = X.real_dim();
  double best = std::numeric_limits<double>::infinity();
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= 5;
  Eigen::VectorXd s(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      s(i) = static_cast<double>(r % 5 - 2);
      nonzero = nonzero || s(i) != 0.0;
      r /= 5;
    }
    if (nonzero) best = std::min(best, (X.Lr() * s).norm());
  }
  return best / 2.0;
}

double evaluate(const Torus& X, const LogSingularFunction& u, const Eigen::VectorXd& x) {
  double d = torus_distance(X, x, u.a);
  if (d >= u.r0) return 0.0;
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(d / u.r0) / u.scale;
}

double dsh_surrogate(const Torus& X, const LogSingularFunction& u, int grid) {
  const int n = X.real_dim();
  int g = grid;
  while (g > 2 && std::pow(static_cast<double>(g), n) > 65536.0) --g;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= g;
  const double h = 1.0 / g;
  double l1 = 0.0, lap = 0.0;
  Eigen::VectorXd x(n), y(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      x(i) = (static_cast<double>(r % g) + 0.5) * h;
      r /= g;
    }
    const double c = evaluate(X, u, x);
    l1 += std::abs(c);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      y = x;
      y(i) += h;
      s += evaluate(X, u, y);
      y(i) -= 2 * h;
      s += evaluate(X, u, y);
      s -= 2 * c;
    }
    lap += std::abs(s) / (h * h);
  }
  return (l1 + lap) / static_cast<double>(total);
}

double haar_exponential_integral(const Torus& X, const LogSingularFunction& u, double lambda) {
  const int D = X.real_dim();
  const int k = X.k();
  const double l = lambda / u.scale;
  if (l >= D) return std::numeric_limits<double>::infinity();
  double kf = 1.0;
  for (int i = 2; i <= k; ++i) kf *= i;
  const double ball = std::pow(M_PI, k) * std::pow(u.r0, D) / kf;
  return 1.0 + ball / X.volume() * l / (D - l);
}

ModerateReport moderate_check(const MeasureDensity& mu, std::vector<LogSingularFunction> u_family,
                              const std::vector<double>& lambda_grid, long long samples, std::uint64_t seed,
                              int workers) {
  if (samples < 2) throw Error("moderate_check needs at least two samples");
  if (!(mu.mass > 0.0)) throw Error("measure has zero mass");
  const Torus& X = *mu.density.torus();
  const double sys = half_systole(X);
  for (auto& u : u_family) {
    if (u.a.size() != X.real_dim()) throw Error("singular point has wrong dimension");
    if (!(u.r0 > 0.0 && u.r0 < sys)) throw Error("r0 must lie below half the systole");
    u.scale = 1.0;
    u.scale = std::max(1.0, dsh_surrogate(X, u));
  }
  for (double l : lambda_grid)
    if (l < 0.0) throw Error("lambda must be >= 0");
  const std::size_t nu = u_family.size(), nl = lambda_grid.size();
  const long long shards = 64;
  std::vector<std::vector<double>> s1(static_cast<std::size_t>(shards), std::vector<double>(nu * nl, 0.0));
  std::vector<std::vector<double>> s2 = s1;
  const int n = X.real_dim();
  parallel_for_shards(
      shards,
      [&](long long shard) {
        CounterRng rng(seed, static_cast<std::uint64_t>(shard));
        const long long lo = samples * shard / shards, hi = samples * (shard + 1) / shards;
        Eigen::VectorXd x(n);
        auto& a1 = s1[static_cast<std::size_t>(shard)];
        auto& a2 = s2[static_cast<std::size_t>(shard)];
        for (long long s = lo; s < hi; ++s) {
          for (int i = 0; i < n; ++i) x(i) = rng.uniform();
          const double w = mu.value(x) / mu.mass;
          for (std::size_t j = 0; j < nu; ++j) {
            const double au = std::abs(evaluate(X, u_family[j], x));
            for (std::size_t t = 0; t < nl; ++t) {
              const double v = w * std::exp(lambda_grid[t] * au);
              a1[j * nl + t] += v;
              a2[j * nl + t] += v * v;
            }
          }
        }
      },
      workers);
  ModerateReport rep;
  const double N = static_cast<double>(samples);
  std::vector<bool> conclusive(nl, true);
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t t = 0; t < nl; ++t) {
      double a = 0.0, b = 0.0;
      for (long long s = 0; s < shards; ++s) {
        a += s1[static_cast<std::size_t>(s)][j * nl + t];
        b += s2[static_cast<std::size_t>(s)][j * nl + t];
      }
      ModerateCell c;
      c.u_index = j;
      c.lambda = lambda_grid[t];
      c.value = a / N;
      const double var = std::max(0.0, b / N - c.value * c.value);
      c.std_error = std::sqrt(var / (N - 1.0));
      const double eff = lambda_grid[t] / u_family[j].scale;
      if (2.0 * eff >= n || !std::isfinite(c.value) || c.std_error > 0.05 * c.value) {
        c.inconclusive = true;
        c.flag = "inconclusive at lambda=" + std::to_string(lambda_grid[t]);
        conclusive[t] = false;
      }
      rep.finite = rep.finite && std::isfinite(c.value);
      rep.cells.push_back(c);
    }
  }
  // Largest lambda such that every smaller grid value is conclusive too.
  std::vector<std::size_t> order(nl);
  for (std::size_t t = 0; t < nl; ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambda_grid[a] < lambda_grid[b]; });
  for (std::size_t t : order) {
    if (!conclusive[t]) break;
    rep.lambda_max = lambda_grid[t];
  }
  for (const auto& c : rep.cells)
    if (c.lambda <= rep.lambda_max && !c.inconclusive) rep.bound = std::max(rep.bound, c.value);
  return rep;
}

}  // namespace kahlerdyn
