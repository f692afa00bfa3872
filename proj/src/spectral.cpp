#include "kahlerdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kahlerdyn/error.hpp"

namespace kahlerdyn {

namespace {

using CMatrix = Eigen::MatrixXcd;
constexpr double kPi = 3.14159265358979323846;

double op_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

CMatrix shifted(const Eigen::MatrixXd& L, std::complex<double> mu) {
  CMatrix c = L.cast<std::complex<double>>();
  c.diagonal().array() -= mu;
  return c;
}

// Orthonormal basis of the column span, dropping directions below rel_tol.
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& cols, double rel_tol) {
  if (cols.cols() == 0) return Eigen::MatrixXd(cols.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * std::max(1.0, s(0))) ++r;
  return svd.matrixU().leftCols(r);
}

struct RawEigen {
  std::complex<double> value;
  int algebraic;
};

std::vector<RawEigen> exact_eigenvalues(const RealMatrix& L, bool& singular) {
  RationalPolynomial cp = characteristic_polynomial(L.exact());
  singular = (cp[0] == 0);
  std::vector<RawEigen> out;
  if (singular) return out;
  for (const auto& f : square_free_decomposition(cp)) {
    for (auto r : square_free_roots(f.factor)) out.push_back({r, f.multiplicity});
  }
  return out;
}

std::vector<RawEigen> float_eigenvalues(const Eigen::MatrixXd& L, bool& singular) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(L, false);
  const auto ev = solver.eigenvalues();
  const double scale = std::max(1.0, op_norm(L));
  singular = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) <= 1e-13 * scale) singular = true;
  std::vector<RawEigen> out;
  if (singular) return out;
  std::vector<bool> used(ev.size(), false);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    std::complex<double> sum = ev(i);
    int count = 1;
    used[i] = true;
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(ev(j) - ev(i)) <= 1e-6 * std::max(1.0, std::abs(ev(i)))) {
        used[j] = true;
        sum += ev(j);
        ++count;
      }
    }
    out.push_back({sum / static_cast<double>(count), count});
  }
  return out;
}

std::vector<int> jordan_sizes(const Eigen::MatrixXd& L, std::complex<double> mu, int algebraic,
                              double tol, std::vector<std::string>& warnings) {
  const int n = static_cast<int>(L.rows());
  const CMatrix c = shifted(L, mu);
  const double cn = std::max(1.0, op_norm(c));
  const double rank_tol = std::max(tol, 1e-11);
  std::vector<int> nullity = {0};
  CMatrix power = CMatrix::Identity(n, n);
  for (int j = 1; j <= algebraic; ++j) {
    power = power * c;
    Eigen::JacobiSVD<CMatrix> svd(power);
    const double thr = rank_tol * std::pow(cn, j) * n;
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > thr) ++rank;
    int nul = std::max(n - rank, nullity.back());
    nullity.push_back(std::min(nul, algebraic));
    if (nullity.back() == algebraic) break;
  }
  if (nullity.back() != algebraic) {
    warnings.push_back("rank sequence inconsistent with algebraic multiplicity; forced");
    nullity.back() = algebraic;
  }
  // at_least[j] = number of blocks of size >= j.
  std::vector<int> at_least(nullity.size() + 1, 0);
  for (std::size_t j = 1; j < nullity.size(); ++j) at_least[j] = nullity[j] - nullity[j - 1];
  std::vector<int> sizes;
  for (std::size_t j = 1; j < nullity.size(); ++j) {
    int exactly = at_least[j] - at_least[j + 1];
    for (int t = 0; t < exactly; ++t) sizes.push_back(static_cast<int>(j));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

// (L - mu)^{m-1} applied to ker (L - mu)^m, split into real and imaginary parts.
Eigen::MatrixXd top_chain_vectors(const Eigen::MatrixXd& L, std::complex<double> mu, int m, int algebraic) {
  const int n = static_cast<int>(L.rows());
  const CMatrix c = shifted(L, mu);
  CMatrix cm = CMatrix::Identity(n, n);
  for (int j = 0; j < m; ++j) cm = cm * c;
  Eigen::JacobiSVD<CMatrix> svd(cm, Eigen::ComputeFullV);
  CMatrix kernel = svd.matrixV().rightCols(algebraic);
  CMatrix img = kernel;
  for (int j = 0; j + 1 < m; ++j) img = c * img;
  Eigen::MatrixXd out(n, 2 * img.cols());
  out << img.real(), img.imag();
  return out;
}

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

struct Fit {
  long long p = 0, q = 1;
  double err = 0.0;
};

Fit best_rational(double x, int denom_bound) {
  // Continued-fraction convergents of x in [0,1).
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  Fit best{0, 1, std::abs(x)};
  if (std::abs(x - 1.0) < best.err) best = {1, 1, std::abs(x - 1.0)};
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(r);
    long long ai = static_cast<long long>(a);
    long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > denom_bound) break;
    double err = std::abs(x - static_cast<double>(p2) / static_cast<double>(q2));
    if (q2 > 0 && err < best.err) best = {p2, q2, err};
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  long long g = std::gcd(best.p, best.q);
  if (g > 1) { best.p /= g; best.q /= g; }
  if (best.p == best.q) { best.p = 0; best.q = 1; }
  return best;
}

constexpr double kRationalErr = 1e-10;
constexpr double kIrrationalErr = 1e-7;

double frac01(double t) {
  double x = t / (2.0 * kPi);
  x -= std::floor(x);
  if (x >= 1.0) x = 0.0;
  return x;
}

}  // namespace

Eigen::MatrixXd span_projector(const Eigen::MatrixXd& basis) {
  return basis * basis.transpose();
}

ThetaGroup classify_theta(const std::vector<double>& theta, int denom_bound) {
  ThetaGroup g;
  std::vector<double> irrational;
  long long order = 1;
  for (double t : theta) {
    double x = frac01(t);
    Fit f = best_rational(x, denom_bound);
    if (f.err <= kRationalErr) {
      order = lcm_ll(order, f.q);
    } else if (f.err >= kIrrationalErr) {
      irrational.push_back(x);
    } else {
      g.kind = ThetaGroup::Kind::Undetermined;
      g.description = "undetermined beyond denom_bound";
      return g;
    }
  }
  if (irrational.empty()) {
    g.kind = ThetaGroup::Kind::Finite;
    g.order = order;
    g.description = order == 1 ? "trivial" : "finite of order " + std::to_string(order);
    return g;
  }
  // Pairwise relation search: a*x + b*y rational with small a, b.
  std::vector<double> basis;
  const int coeff_bound = 8;
  for (double x : irrational) {
    bool dependent = false;
    for (double y : basis) {
      for (int a = 1; a <= coeff_bound && !dependent; ++a)
        for (int b = -coeff_bound; b <= coeff_bound && !dependent; ++b) {
          if (b == 0) continue;
          double z = a * x + b * y;
          z -= std::floor(z);
          if (best_rational(z, denom_bound).err <= kRationalErr) dependent = true;
        }
      if (dependent) break;
    }
    if (!dependent) basis.push_back(x);
  }
  g.kind = ThetaGroup::Kind::Torus;
  g.torus_rank = static_cast<int>(basis.size());
  g.description = "torus rank " + std::to_string(g.torus_rank) + " (up to bound)";
  return g;
}

ThetaGroup dominant_direction_group(const SpectralProfile& profile, int denom_bound) {
  if (profile.nu() < 1) throw Error("dominant direction needs at least one dominant eigenvalue");
  return classify_theta(profile.theta, denom_bound);
}

SpectralProfile compute_spectral_profile(const RealMatrix& L, double tol, int denom_bound) {
  if (!L.is_square() || L.rows() == 0) throw Error("spectral profile needs a nonempty square matrix");
  if (!(tol > 0)) throw Error("tolerance must be positive");
  SpectralProfile prof;
  prof.dim = L.rows();
  prof.tol = tol;
  prof.exact_path = L.is_exact();
  bool singular = false;
  std::vector<RawEigen> raw =
      L.is_exact() ? exact_eigenvalues(L, singular) : float_eigenvalues(L.values(), singular);
  if (singular) throw Error("not an automorphism action");

  const Eigen::MatrixXd& A = L.values();
  for (const auto& r : raw) {
    EigenCluster c;
    c.value = r.value;
    c.algebraic = r.algebraic;
    c.jordan_sizes = jordan_sizes(A, r.value, r.algebraic, tol, prof.warnings);
    prof.eigenvalues.push_back(std::move(c));
  }

  double lambda = 0.0;
  for (const auto& c : prof.eigenvalues) lambda = std::max(lambda, std::abs(c.value));
  prof.spectral_radius = lambda;

  // Snap moduli within tol of each other before ordering so ties sort by block size then argument.
  std::vector<double> key(prof.eigenvalues.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    double mod = std::abs(prof.eigenvalues[i].value);
    key[i] = (lambda - mod <= tol * lambda) ? lambda : mod;
  }
  std::vector<std::size_t> order(prof.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = prof.eigenvalues[a];
    const auto& eb = prof.eigenvalues[b];
    double ka = key[a], kb = key[b];
    if (std::abs(ka - kb) > tol * std::max(ka, kb)) return ka > kb;
    if (ea.jordan_sizes.front() != eb.jordan_sizes.front()) return ea.jordan_sizes.front() > eb.jordan_sizes.front();
    return std::arg(ea.value) > std::arg(eb.value);
  });
  std::vector<EigenCluster> sorted;
  for (auto i : order) sorted.push_back(prof.eigenvalues[i]);
  prof.eigenvalues = std::move(sorted);

  // Modulus clusters in dominance order.
  for (std::size_t i = 0; i < prof.eigenvalues.size(); ++i) {
    double mod = std::abs(prof.eigenvalues[i].value);
    if (!prof.modulus_clusters.empty()) {
      double ref = std::abs(prof.eigenvalues[prof.modulus_clusters.back().front()].value);
      if (std::abs(ref - mod) <= tol * std::max(ref, mod)) {
        prof.modulus_clusters.back().push_back(static_cast<int>(i));
        continue;
      }
    }
    prof.modulus_clusters.push_back({static_cast<int>(i)});
  }
  for (std::size_t c = 0; c + 1 < prof.modulus_clusters.size(); ++c) {
    double a = std::abs(prof.eigenvalues[prof.modulus_clusters[c].back()].value);
    double b = std::abs(prof.eigenvalues[prof.modulus_clusters[c + 1].front()].value);
    double gap = (a - b) / std::max(a, b);
    if (gap > tol && gap <= 2 * tol) {
      prof.near_tie = true;
      prof.warnings.push_back("near-tie between modulus clusters " + std::to_string(c) + " and " +
                              std::to_string(c + 1));
    }
  }

  const auto& top = prof.modulus_clusters.front();
  int m = 1;
  for (int i : top) m = std::max(m, prof.eigenvalues[i].jordan_sizes.front());
  prof.multiplicity_m = m;

  std::vector<Eigen::MatrixXd> f_parts, h_parts;
  for (int i : top) {
    const auto& c = prof.eigenvalues[i];
    if (c.jordan_sizes.front() != m) continue;
    prof.dominant_eigenvalues.push_back(c.value);
    double th = std::arg(c.value);
    if (std::abs(c.value.imag()) <= tol * lambda) th = c.value.real() > 0 ? 0.0 : kPi;
    prof.theta.push_back(th);
    Eigen::MatrixXd vecs = top_chain_vectors(A, c.value, m, c.algebraic);
    f_parts.push_back(vecs);
    if (std::abs(c.value.imag()) <= tol * lambda && c.value.real() > 0) h_parts.push_back(vecs);
  }
  auto stack = [&](const std::vector<Eigen::MatrixXd>& parts) {
    Eigen::Index cols = 0;
    for (const auto& p : parts) cols += p.cols();
    Eigen::MatrixXd all(prof.dim, cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      all.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    return orthonormal_span(all, 1e-8);
  };
  prof.F_basis = stack(f_parts);
  prof.H_basis = stack(h_parts);
  prof.theta_group = classify_theta(prof.theta, denom_bound);
  return prof;
}

Eigen::MatrixXd normalized_iterate(const RealMatrix& L, const SpectralProfile& profile, long long n) {
  if (n < 1) throw Error("normalized_iterate needs n >= 1");
  const Eigen::Index dim = L.rows();
  // result = exp(log_scale) * acc, with acc kept at unit max-norm.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(dim, dim);
  double log_scale = 0.0;
  Eigen::MatrixXd base = L.values();
  double base_log = 0.0;
  auto renorm = [](Eigen::MatrixXd& m, double& lg) {
    double s = m.cwiseAbs().maxCoeff();
    if (s > 0) {
      m /= s;
      lg += std::log(s);
    }
  };
  renorm(base, base_log);
  long long e = n;
  while (e > 0) {
    if (e & 1) {
      acc = acc * base;
      log_scale += base_log;
      renorm(acc, log_scale);
    }
    e >>= 1;
    if (e > 0) {
      base = base * base;
      base_log *= 2;
      renorm(base, base_log);
    }
  }
  const double lam = profile.spectral_radius;
  const double total = log_scale - static_cast<double>(n) * std::log(lam) +
                       (1.0 - profile.multiplicity_m) * std::log(static_cast<double>(n));
  return acc * std::exp(total);
}

Eigen::MatrixXd cesaro_operator(const RealMatrix& L, const SpectralProfile& profile, long long N) {
  if (N < 1) throw Error("cesaro_operator needs N >= 1");
  const Eigen::Index dim = L.rows();
  const Eigen::MatrixXd step = L.values() / profile.spectral_radius;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  const double expo = 1.0 - profile.multiplicity_m;
  for (long long n = 1; n <= N; ++n) {
    q = q * step;
    sum += q * std::pow(static_cast<double>(n), expo);
  }
  return sum / static_cast<double>(N);
}

ProjectorResult limit_projector(const RealMatrix& L, const SpectralProfile& profile, double tol,
                                long long N_max) {
  if (N_max < 2) throw Error("limit_projector needs N_max >= 2");
  if (!(tol > 0)) throw Error("tolerance must be positive");
  const Eigen::Index dim = L.rows();
  long long period = profile.theta_group.kind == ThetaGroup::Kind::Finite ? profile.theta_group.order : 1;
  // Multiples of the period, roughly geometric with ratio 3/2.
  std::vector<long long> samples;
  for (double x = 8.0; ; x *= 1.5) {
    long long N = period * static_cast<long long>(std::ceil(x));
    if (N > N_max) break;
    if (samples.empty() || N > samples.back()) samples.push_back(N);
  }

  ProjectorResult res;
  std::vector<Eigen::MatrixXd> averages;
  {
    const Eigen::MatrixXd step = L.values() / profile.spectral_radius;
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
    const double expo = 1.0 - profile.multiplicity_m;
    std::size_t next = 0;
    const long long last = samples.empty() ? N_max : samples.back();
    for (long long n = 1; n <= last; ++n) {
      q = q * step;
      sum += q * std::pow(static_cast<double>(n), expo);
      if (next < samples.size() && n == samples[next]) {
        averages.push_back(sum / static_cast<double>(n));
        ++next;
      }
    }
    if (samples.empty()) {
      samples.push_back(N_max);
      averages.push_back(sum / static_cast<double>(N_max));
    }
  }

  constexpr int kFit = 5;
  auto extrapolate = [&](std::size_t j) {
    // Constant term of the fit on {1, 1/N, ln N / N, 1/N^2, 1/N^3} through kFit samples.
    Eigen::MatrixXd basis(kFit, kFit);
    for (int r = 0; r < kFit; ++r) {
      double N = static_cast<double>(samples[j - (kFit - 1) + r]);
      basis(r, 0) = 1.0;
      basis(r, 1) = 1.0 / N;
      basis(r, 2) = std::log(N) / N;
      basis(r, 3) = 1.0 / (N * N);
      basis(r, 4) = 1.0 / (N * N * N);
    }
    Eigen::RowVectorXd w = basis.inverse().row(0);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
    for (int r = 0; r < kFit; ++r) p += w(r) * averages[j - (kFit - 1) + r];
    return p;
  };

  if (samples.size() < kFit + 1) {
    res.projector = averages.back();
    res.N_used = samples.back();
    res.residual = averages.size() >= 2 ? op_norm(Eigen::MatrixXd(averages.back() - averages[averages.size() - 2]))
                                         : std::numeric_limits<double>::infinity();
    res.converged = res.residual < tol;
  } else {
    Eigen::MatrixXd prev = extrapolate(kFit - 1);
    for (std::size_t j = kFit; j < samples.size(); ++j) {
      Eigen::MatrixXd cur = extrapolate(j);
      res.residual = op_norm(Eigen::MatrixXd(cur - prev));
      res.projector = cur;
      res.N_used = samples[j];
      prev = std::move(cur);
      if (res.residual < tol) {
        res.converged = true;
        break;
      }
    }
  }

  for (std::size_t j = 0; j < averages.size() && samples[j] <= res.N_used; ++j)
    res.raw_gaps.emplace_back(samples[j], op_norm(Eigen::MatrixXd(averages[j] - res.projector)));

  const Eigen::MatrixXd pi_h = span_projector(profile.H_basis);
  res.image_residual =
      op_norm(Eigen::MatrixXd((Eigen::MatrixXd::Identity(dim, dim) - pi_h) * res.projector));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.projector);
  const double pn = std::max(1.0, svd.singularValues()(0));
  res.rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-6 * pn) ++res.rank;
  res.equivariance_residual =
      op_norm(Eigen::MatrixXd(res.projector * L.values() - profile.spectral_radius * res.projector));
  return res;
}

}  // namespace kahlerdyn
