#include "kahlerdyn/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "kahlerdyn/error.hpp"
#include "kahlerdyn/forms.hpp"
#include "kahlerdyn/green.hpp"
#include "kahlerdyn/rng.hpp"

namespace kahlerdyn {

namespace {

constexpr long long kShards = 64;

Eigen::VectorXd center_or_zero(const Eigen::VectorXd& c, int n) {
  return c.size() == 0 ? Eigen::VectorXd::Zero(n) : c;
}

// Sup-norm in basis V of the shortest lift of a lattice-coordinate difference.
class SupDistance {
 public:
  SupDistance(const Torus& X, const Eigen::MatrixXd& V) : G_(V.inverse() * X.Lr()), n_(X.real_dim()) {
    long long total = 1;
    for (int i = 0; i < n_; ++i) total *= 3;
    Eigen::VectorXd s(n_);
    for (long long idx = 0; idx < total; ++idx) {
      long long r = idx;
      for (int i = 0; i < n_; ++i) {
        s(i) = static_cast<double>(r % 3 - 1);
        r /= 3;
      }
      Eigen::VectorXd t = G_ * s;
      shifts_.insert(shifts_.end(), t.data(), t.data() + n_);
    }
  }

  /// True when some lift of u has sup-norm at most eps. u must be reduced.
  bool within(const Eigen::VectorXd& u, double eps) const {
    thread_local std::vector<double> y;
    y.resize(static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r) {
      double c = 0.0;
      for (int j = 0; j < n_; ++j) c += G_(r, j) * u(j);
      y[r] = c;
    }
    for (std::size_t off = 0; off < shifts_.size(); off += static_cast<std::size_t>(n_)) {
      bool ok = true;
      for (int r = 0; r < n_ && ok; ++r) ok = std::abs(y[r] + shifts_[off + r]) <= eps;
      if (ok) return true;
    }
    return false;
  }

 private:
  Eigen::MatrixXd G_;
  int n_;
  std::vector<double> shifts_;
};

double log_box_volume(const Torus& X, const BowenBasis& basis, double epsilon) {
  const int n = X.real_dim();
  return n * std::log(2.0 * epsilon) + std::log(std::abs(basis.V.determinant())) - std::log(X.volume());
}

}  // namespace

BowenBasis bowen_basis(const TorusMap& f, double tol) {
  const Eigen::MatrixXd D = f.real_derivative();
  const int n = static_cast<int>(D.rows());
  BowenBasis out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(D);
  bool real = true;
  for (int i = 0; i < n; ++i)
    real = real && std::abs(es.eigenvalues()(i).imag()) <= tol * std::max(1.0, std::abs(es.eigenvalues()(i)));
  if (real) {
    Eigen::MatrixXd V = es.eigenvectors().real();
    for (int j = 0; j < n; ++j) V.col(j).normalize();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const auto& sv = svd.singularValues();
    if (sv(n - 1) > 1e-8 * sv(0)) {
      out.V = V;
      out.log_stretch.resize(n);
      for (int j = 0; j < n; ++j) out.log_stretch(j) = std::log(std::abs(es.eigenvalues()(j).real()));
      out.eigen = true;
      return out;
    }
  }
  out.V = Eigen::MatrixXd::Identity(n, n);
  return out;
}

void check_bowen_epsilon(const TorusMap& f, const BowenBasis& basis, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  double reach = 0.0;
  for (int j = 0; j < basis.V.cols(); ++j) reach += basis.V.col(j).norm();
  if (epsilon * reach >= half_systole(*f.torus())) throw Error("epsilon exceeds the embedding radius");
}

double bowen_ball_log_volume(const BowenQuery& q) {
  if (q.n < 0) throw Error("n must be nonnegative");
  TorusMap f(q.map);
  BowenBasis basis = bowen_basis(f);
  if (!basis.eigen) throw Error("use monte-carlo");
  check_bowen_epsilon(f, basis, q.epsilon);
  double lv = log_box_volume(*f.torus(), basis, q.epsilon);
  for (int j = 0; j < basis.log_stretch.size(); ++j) lv -= q.n * std::max(0.0, basis.log_stretch(j));
  return lv;
}

BowenMonteCarlo bowen_ball_monte_carlo(const BowenQuery& q, long long samples, std::uint64_t seed,
                                       std::uint64_t stream, int workers) {
  if (q.n < 0) throw Error("n must be nonnegative");
  if (samples <= 0) throw Error("samples must be positive");
  TorusMap f(q.map);
  const Torus& X = *f.torus();
  const int dim = X.real_dim();
  BowenBasis basis = bowen_basis(f);
  check_bowen_epsilon(f, basis, q.epsilon);
  const SupDistance dist(X, basis.V);
  const Eigen::MatrixXd to_lattice = X.Lr_inv() * basis.V;
  Eigen::MatrixXd B = f.B().cast<double>();

  std::vector<long long> hits(kShards, 0);
  parallel_for_shards(
      kShards,
      [&](long long shard) {
        CounterRng rng(seed, stream * kShards + static_cast<std::uint64_t>(shard));
        long long count = samples / kShards + (shard < samples % kShards ? 1 : 0);
        Eigen::VectorXd w(dim);
        long long h = 0;
        for (long long s = 0; s < count; ++s) {
          for (int i = 0; i < dim; ++i) w(i) = rng.uniform(-q.epsilon, q.epsilon);
          // Difference of the orbits in lattice coordinates: u -> B u mod 1.
          Eigen::VectorXd u = to_lattice * w;
          bool inside = true;
          for (int i = 1; i <= q.n && inside; ++i) {
            u = B * u;
            for (int j = 0; j < dim; ++j) u(j) -= std::round(u(j));
            inside = dist.within(u, q.epsilon);
          }
          if (inside) ++h;
        }
        hits[shard] = h;
      },
      workers);
  BowenMonteCarlo out;
  out.samples = samples;
  for (long long h : hits) out.hits += h;
  out.fraction = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.std_error = std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(samples));
  out.log_volume = out.hits > 0 ? log_box_volume(X, basis, q.epsilon) + std::log(out.fraction)
                                : -std::numeric_limits<double>::infinity();
  return out;
}

EntropyEstimate brin_katok_estimate(const TorusSpec& map, int n, double epsilon,
                                    const std::vector<Eigen::VectorXd>& centers, long long samples,
                                    std::uint64_t seed, const std::string& method, int workers) {
  if (n < 1) throw Error("n must be at least 1");
  if (method != "auto" && method != "exact-box" && method != "monte-carlo") throw Error("unknown method: " + method);
  TorusMap f(map);
  BowenBasis basis = bowen_basis(f);
  EntropyEstimate est;
  est.n_used = n;
  est.epsilon = epsilon;
  const bool exact = method == "exact-box" || (method == "auto" && basis.eigen);
  est.method = exact ? "exact-box" : "monte-carlo";
  std::vector<Eigen::VectorXd> cs = centers;
  if (cs.empty()) cs.push_back(Eigen::VectorXd::Zero(f.torus()->real_dim()));

  const double log_b0 = log_box_volume(*f.torus(), basis, epsilon);
  std::vector<double> raw;
  double sampling = 0.0;
  for (std::size_t c = 0; c < cs.size(); ++c) {
    BowenQuery q{map, n, epsilon, center_or_zero(cs[c], f.torus()->real_dim())};
    double lv = 0.0;
    if (exact) {
      lv = bowen_ball_log_volume(q);
    } else {
      auto mc = bowen_ball_monte_carlo(q, samples, seed, c, workers);
      if (mc.hits == 0) throw Error("n too large for sample budget");
      lv = mc.log_volume;
      // Delta method: SE of log(fraction).
      sampling = std::max(sampling, mc.std_error / mc.fraction / n);
    }
    est.per_center.push_back(std::max(0.0, -(lv - log_b0) / n));
    raw.push_back(-lv / n);
  }
  double mean = 0.0, raw_mean = 0.0;
  for (std::size_t c = 0; c < cs.size(); ++c) {
    mean += est.per_center[c];
    raw_mean += raw[c];
  }
  mean /= static_cast<double>(cs.size());
  raw_mean /= static_cast<double>(cs.size());
  double spread = 0.0;
  for (double v : est.per_center) spread = std::max(spread, std::abs(v - mean));
  est.h_value = mean;
  est.raw_value = raw_mean;
  est.error_bar = spread + sampling;
  return est;
}

double misiurewicz_bound(const std::vector<double>& c, const std::vector<double>& n, int window) {
  if (c.size() != n.size()) throw Error("c and n must have equal length");
  if (c.empty()) throw Error("empty sequence");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!(c[i] > 0.0) || !(n[i] > 0.0)) throw Error("c and n must be positive");
  if (c.size() == 1) return -std::log(c[0]) / n[0];
  if (window < 1) throw Error("window must be positive");
  const std::size_t first = c.size() - 1 > static_cast<std::size_t>(window) ? c.size() - 1 - window : 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i + 1 < c.size(); ++i) {
    if (!(n[i + 1] > n[i])) throw Error("n must be increasing");
    best = std::max(best, -(std::log(c[i + 1]) - std::log(c[i])) / (n[i + 1] - n[i]));
  }
  return best;
}

LyapunovSpectrum lyapunov_exponents(const TorusSpec& map, double tol) {
  TorusMap f(map);
  Eigen::MatrixXd D = f.real_derivative();
  Eigen::EigenSolver<Eigen::MatrixXd> es(D, false);
  LyapunovSpectrum out;
  for (int i = 0; i < D.rows(); ++i) out.exponents.push_back(std::log(std::abs(es.eigenvalues()(i))));
  std::sort(out.exponents.begin(), out.exponents.end(), std::greater<double>());
  out.hyperbolic = true;
  for (double e : out.exponents) {
    out.sum += e;
    if (std::abs(e) <= tol) out.hyperbolic = false;
    if (!out.distinct.empty() && std::abs(out.distinct.back().first - e) <= tol)
      ++out.distinct.back().second;
    else
      out.distinct.emplace_back(e, 1);
  }
  return out;
}

DeThelinVerdict de_thelin_check(const LyapunovSpectrum& exponents, const DegreeProfile& degrees, double tol) {
  const auto& d = degrees.degrees;
  const int k = static_cast<int>(d.size()) - 1;
  if (k < 1 || static_cast<int>(exponents.exponents.size()) != 2 * k)
    throw Error("exponents and degrees have inconsistent dimensions");
  int p = 0;
  for (int q = 1; q <= k; ++q)
    if (d[q] > d[p]) p = q;
  for (int q = 0; q <= k; ++q)
    if (q != p && d[q] >= d[p] * (1.0 - degrees.tol)) throw Error("no strictly maximal dynamical degree");

  DeThelinVerdict v;
  v.p = p;
  std::vector<double> chi;  // complex exponents, descending
  for (int i = 0; i < k; ++i) chi.push_back(exponents.exponents[2 * i]);
  v.bound_plus = p > 0 ? 0.5 * std::log(d[p] / d[p - 1]) : 0.0;
  v.bound_minus = p < k ? 0.5 * std::log(d[p] / d[p + 1]) : 0.0;
  v.equality_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (i < p && chi[i] >= v.bound_plus - tol) {
      ++v.count_plus;
      v.equality_gap = std::min(v.equality_gap, chi[i] - v.bound_plus);
    }
    if (i >= p && chi[i] <= -v.bound_minus + tol) {
      ++v.count_minus;
      v.equality_gap = std::min(v.equality_gap, -v.bound_minus - chi[i]);
    }
  }
  v.passed = v.count_plus == p && v.count_minus == k - p;
  v.details = "p=" + std::to_string(p) + " positive " + std::to_string(v.count_plus) + "/" + std::to_string(p) +
              " negative " + std::to_string(v.count_minus) + "/" + std::to_string(k - p);
  return v;
}

YomdinReport yomdin_ball_mass(const TorusSpec& map, int n_max, double epsilon, double delta, long long samples,
                              std::uint64_t seed, int centers, int p, int workers) {
  if (n_max < 0) throw Error("n_max must be nonnegative");
  TorusMap f(map);
  auto X = f.torus();
  const int k = X->k();
  BowenBasis basis = bowen_basis(f);
  check_bowen_epsilon(f, basis, epsilon);
  YomdinReport rep;
  rep.delta = delta;
  if (p < 0) {
    auto prof = dynamical_degrees(build_torus_cohomology(f));
    p = prof.p;
  }
  if (p > k) throw Error("p out of range");
  rep.p = p;
  rep.method = basis.eigen ? "exact-box" : "monte-carlo";

  FourierForm S = FourierForm::omega_power(X, p);
  const FourierForm rest = FourierForm::omega_power(X, k - p);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) S = pullback(f, S);
    const double dens = mass(wedge(S, rest));
    rep.density.push_back(dens);
    double best = 0.0, se = 0.0;
    if (basis.eigen) {
      best = dens * std::exp(bowen_ball_log_volume({map, n, epsilon, {}}) - n * delta);
    } else {
      for (int c = 0; c < std::max(1, centers); ++c) {
        auto mc = bowen_ball_monte_carlo({map, n, epsilon, {}}, samples, seed,
                                         static_cast<std::uint64_t>(n) * 1000 + c, workers);
        const double scale = dens * std::exp(log_box_volume(*X, basis, epsilon) - n * delta);
        if (mc.fraction * scale >= best) {
          best = mc.fraction * scale;
          se = mc.std_error * scale;
        }
        if (mc.hits == 0 || mc.std_error > 0.05 * mc.fraction) rep.inconclusive = true;
      }
    }
    rep.values.push_back(best);
    rep.std_error.push_back(se);
    rep.A = std::max(rep.A, best);
  }
  // Least-squares slope of log value against n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 0; n <= n_max; ++n) {
    if (!(rep.values[n] > 0.0)) continue;
    const double y = std::log(rep.values[n]);
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
    ++m;
  }
  rep.growth_rate = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  rep.bounded = !rep.inconclusive && m >= 2 && rep.growth_rate <= 1e-6;
  return rep;
}

}  // namespace kahlerdyn
