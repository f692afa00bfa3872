#include "kahlerdyn/forms.hpp"

#include <algorithm>
#include <cmath>

#include "kahlerdyn/error.hpp"
#include "kahlerdyn/rng.hpp"

namespace kahlerdyn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

std::complex<double> i_power(int e) {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((e % 4) + 4) % 4];
}

void require_same_torus(const FourierForm& a, const FourierForm& b) {
  if (a.torus() != b.torus() && !a.torus()->same_as(*b.torus())) throw Error("forms live on different tori");
}

double phase_dot(const Mode& m, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) s += static_cast<double>(m[j]) * x(static_cast<Eigen::Index>(j));
  return s;
}

}  // namespace

double mode_norm(const Mode& m) {
  double s = 0.0;
  for (auto v : m) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

Mode negate(const Mode& m) {
  Mode out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = -m[i];
  return out;
}

Mode zero_mode(int k) { return Mode(static_cast<std::size_t>(2 * k), 0); }

FourierForm::FourierForm(std::shared_ptr<const Torus> torus, Bidegree b) : torus_(std::move(torus)), bidegree_(b) {
  if (!torus_) throw Error("form needs a torus");
  if (b.p < 0 || b.q < 0 || b.p > torus_->k() || b.q > torus_->k()) throw Error("bidegree out of range");
  dim_ = covector_dim(torus_->k(), b);
}

FourierForm FourierForm::constant(std::shared_ptr<const Torus> torus, Bidegree b, const Eigen::VectorXcd& c) {
  int k = torus->k();
  FourierForm f(std::move(torus), b);
  f.add(zero_mode(k), c);
  return f;
}

FourierForm FourierForm::single_mode(std::shared_ptr<const Torus> torus, Bidegree b, const Mode& m,
                                     const Eigen::VectorXcd& c) {
  FourierForm f(std::move(torus), b);
  f.add(m, c);
  return f;
}

FourierForm FourierForm::cos_mode(std::shared_ptr<const Torus> torus, const Mode& m, double amplitude) {
  FourierForm f(std::move(torus), {0, 0});
  Eigen::VectorXcd c(1);
  c(0) = amplitude / 2;
  f.add(m, c);
  f.add(negate(m), c);
  return f;
}

FourierForm FourierForm::sin_mode(std::shared_ptr<const Torus> torus, const Mode& m, double amplitude) {
  FourierForm f(std::move(torus), {0, 0});
  Eigen::VectorXcd c(1);
  c(0) = std::complex<double>(0.0, -amplitude / 2);
  f.add(m, c);
  f.add(negate(m), -c);
  return f;
}

FourierForm FourierForm::omega_power(std::shared_ptr<const Torus> torus, int q) {
  int k = torus->k();
  return constant(std::move(torus), {q, q}, omega_power_covector(k, q));
}

FourierForm FourierForm::from_real_coordinates(std::shared_ptr<const Torus> torus, int p, const Eigen::VectorXd& coords) {
  int k = torus->k();
  Eigen::VectorXcd raw = real_basis_matrix(k, p) * coords.cast<std::complex<double>>();
  return constant(std::move(torus), {p, p}, raw);
}

Eigen::VectorXcd FourierForm::coefficient(const Mode& m) const {
  auto it = coeffs_.find(m);
  if (it == coeffs_.end()) return Eigen::VectorXcd::Zero(dim_);
  return it->second;
}

void FourierForm::add(const Mode& m, const Eigen::VectorXcd& c) {
  if (static_cast<int>(m.size()) != 2 * k()) throw Error("mode has wrong length");
  if (c.size() != dim_) throw Error("coefficient vector has wrong length");
  auto it = coeffs_.find(m);
  if (it == coeffs_.end()) {
    coeffs_.emplace(m, c);
  } else {
    it->second += c;
  }
}

long long FourierForm::radius() const {
  long long r = 0;
  for (const auto& [m, c] : coeffs_)
    for (auto v : m) r = std::max(r, v < 0 ? -v : v);
  return r;
}

FourierForm& FourierForm::operator+=(const FourierForm& o) {
  require_same_torus(*this, o);
  if (o.bidegree_ != bidegree_) throw Error("bidegree mismatch in sum");
  for (const auto& [m, c] : o.coeffs_) add(m, c);
  dropped_ += o.dropped_;
  return *this;
}

FourierForm& FourierForm::operator-=(const FourierForm& o) {
  require_same_torus(*this, o);
  if (o.bidegree_ != bidegree_) throw Error("bidegree mismatch in difference");
  for (const auto& [m, c] : o.coeffs_) add(m, -c);
  dropped_ += o.dropped_;
  return *this;
}

FourierForm& FourierForm::operator*=(std::complex<double> s) {
  for (auto& [m, c] : coeffs_) c *= s;
  dropped_ *= std::abs(s);
  return *this;
}

FourierForm FourierForm::pruned(double eps) const {
  FourierForm out(torus_, bidegree_);
  for (const auto& [m, c] : coeffs_)
    if (c.norm() > eps) out.coeffs_.emplace(m, c);
  out.dropped_ = dropped_;
  return out;
}

FourierForm FourierForm::conjugate() const {
  const Bidegree cb{bidegree_.q, bidegree_.p};
  FourierForm out(torus_, cb);
  const double sign = ((bidegree_.p * bidegree_.q) % 2) ? -1.0 : 1.0;
  for (const auto& [m, c] : coeffs_) {
    Eigen::VectorXcd v(dim_);
    for (int i = 0; i < dim_; ++i) v(conjugate_index(k(), bidegree_, i)) = sign * std::conj(c(i));
    out.add(negate(m), v);
  }
  out.dropped_ = dropped_;
  return out;
}

double FourierForm::reality_defect() const {
  if (bidegree_.p != bidegree_.q) return coeffs_.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  const double scale = std::max(max_coefficient(), 1e-300);
  FourierForm c = conjugate();
  double worst = 0.0;
  for (const auto& [m, v] : coeffs_) worst = std::max(worst, (v - c.coefficient(m)).norm());
  for (const auto& [m, v] : c.coeffs_) worst = std::max(worst, (v - coefficient(m)).norm());
  return coeffs_.empty() ? 0.0 : worst / scale;
}

FourierForm FourierForm::real_part() const {
  if (bidegree_.p != bidegree_.q) throw Error("real part needs a (p,p)-form");
  FourierForm out = *this + conjugate();
  out *= 0.5;
  out.dropped_ = dropped_;
  return out;
}

Eigen::VectorXcd FourierForm::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
  for (const auto& [m, c] : coeffs_) {
    double ph = kTwoPi * phase_dot(m, x);
    v += std::complex<double>(std::cos(ph), std::sin(ph)) * c;
  }
  return v;
}

double FourierForm::coefficient_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s += c.squaredNorm();
  return std::sqrt(s);
}

double FourierForm::max_coefficient() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s = std::max(s, c.norm());
  return s;
}

FourierForm wedge(const FourierForm& F, const FourierForm& G, const FormConfig& cfg) {
  require_same_torus(F, G);
  const int k = F.k();
  const Bidegree b1 = F.bidegree(), b2 = G.bidegree();
  const WedgeTable& t = wedge_table(k, b1, b2);
  FourierForm out(F.torus(), t.out);
  double dropped = 0.0;
  Mode sum(static_cast<std::size_t>(2 * k));
  for (const auto& [m1, c1] : F.coefficients()) {
    for (const auto& [m2, c2] : G.coefficients()) {
      bool inside = true;
      for (int j = 0; j < 2 * k; ++j) {
        sum[j] = m1[j] + m2[j];
        if (sum[j] > cfg.box || sum[j] < -cfg.box) inside = false;
      }
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(out.dim());
      for (int i1 = 0; i1 < t.n1; ++i1) {
        if (c1(i1) == 0.0) continue;
        for (int i2 = 0; i2 < t.n2; ++i2) {
          const auto& e = t.at(i1, i2);
          if (e.out >= 0) v(e.out) += static_cast<double>(e.sign) * c1(i1) * c2(i2);
        }
      }
      if (inside) {
        out.add(sum, v);
      } else {
        dropped += v.norm();
      }
    }
  }
  out.set_dropped(dropped + F.dropped_mass() * G.max_coefficient() + G.dropped_mass() * F.max_coefficient());
  return out;
}

FourierForm del(const FourierForm& F) {
  const int k = F.k();
  const Bidegree b = F.bidegree();
  if (b.p == k) return FourierForm(F.torus(), {b.p, b.q});  // zero, same bidegree by convention
  const Bidegree ob{b.p + 1, b.q};
  FourierForm out(F.torus(), ob);
  const auto& P = combinations(k, b.p);
  const auto& Q = combinations(k, b.q);
  const int nq = static_cast<int>(Q.size());
  const std::complex<double> tpi(0.0, kTwoPi);
  for (const auto& [m, c] : F.coefficients()) {
    Eigen::VectorXcd xi = F.torus()->symbol(m);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(out.dim());
    for (int idx = 0; idx < F.dim(); ++idx) {
      if (c(idx) == 0.0) continue;
      unsigned I = P[idx / nq], J = Q[idx % nq];
      for (int l = 0; l < k; ++l) {
        if (I & (1u << l)) continue;
        int below = popcount(I & ((1u << l) - 1u));
        double s = (below % 2) ? -1.0 : 1.0;
        int o = combination_index(k, I | (1u << l)) * nq + combination_index(k, J);
        v(o) += s * tpi * xi(l) * c(idx);
      }
    }
    out.add(m, v);
  }
  return out;
}

FourierForm delbar(const FourierForm& F) {
  const int k = F.k();
  const Bidegree b = F.bidegree();
  if (b.q == k) return FourierForm(F.torus(), {b.p, b.q});
  const Bidegree ob{b.p, b.q + 1};
  FourierForm out(F.torus(), ob);
  const auto& P = combinations(k, b.p);
  const auto& Q = combinations(k, b.q);
  const int nq = static_cast<int>(Q.size());
  const int nqo = static_cast<int>(binomial(k, b.q + 1));
  const std::complex<double> tpi(0.0, kTwoPi);
  const double psign = (b.p % 2) ? -1.0 : 1.0;
  for (const auto& [m, c] : F.coefficients()) {
    Eigen::VectorXcd xi = F.torus()->symbol(m).conjugate();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(out.dim());
    for (int idx = 0; idx < F.dim(); ++idx) {
      if (c(idx) == 0.0) continue;
      unsigned I = P[idx / nq], J = Q[idx % nq];
      for (int l = 0; l < k; ++l) {
        if (J & (1u << l)) continue;
        int below = popcount(J & ((1u << l) - 1u));
        double s = psign * ((below % 2) ? -1.0 : 1.0);
        int o = combination_index(k, I) * nqo + combination_index(k, J | (1u << l));
        v(o) += s * tpi * xi(l) * c(idx);
      }
    }
    out.add(m, v);
  }
  return out;
}

FourierForm ddc(const FourierForm& F) {
  const Bidegree b = F.bidegree();
  if (b.p == F.k() || b.q == F.k()) return FourierForm(F.torus(), {std::min(b.p + 1, F.k()), std::min(b.q + 1, F.k())});
  FourierForm out = del(delbar(F));
  out *= std::complex<double>(0.0, 1.0 / M_PI);
  out.set_dropped(F.dropped_mass());
  return out;
}

double d_residual(const FourierForm& F) {
  const double scale = F.max_coefficient();
  if (scale == 0.0) return 0.0;
  double r = 0.0;
  if (F.bidegree().p < F.k()) r = std::max(r, del(F).max_coefficient());
  if (F.bidegree().q < F.k()) r = std::max(r, delbar(F).max_coefficient());
  return r / scale;
}

FourierForm pullback(const TorusMap& f, const FourierForm& F, const FormConfig& cfg) {
  if (!f.torus()->same_as(*F.torus())) throw Error("map and form live on different tori");
  const int k = F.k();
  const int n = 2 * k;
  const Eigen::MatrixXcd K = covector_pullback_matrix(f.A(), F.bidegree());
  const IntMatrix& B = f.B();
  const Eigen::VectorXd& t = f.t();
  FourierForm out(F.torus(), F.bidegree());
  double dropped = F.dropped_mass();
  Mode img(static_cast<std::size_t>(n));
  for (const auto& [m, c] : F.coefficients()) {
    bool inside = true;
    for (int i = 0; i < n; ++i) {
      __int128 s = 0;
      for (int j = 0; j < n; ++j) s += static_cast<__int128>(B(j, i)) * m[j];
      if (s > cfg.box || s < -cfg.box) {
        inside = false;
        break;
      }
      img[i] = static_cast<long long>(s);
    }
    if (!inside) {
      dropped += c.norm();
      continue;
    }
    double ph = kTwoPi * phase_dot(m, t);
    // Reduce the phase argument before the trig calls; m.t can be large.
    ph = std::fmod(ph, kTwoPi);
    out.add(img, std::complex<double>(std::cos(ph), std::sin(ph)) * (K * c));
  }
  out.set_dropped(dropped);
  return out;
}

FourierForm pushforward(const TorusMap& f, const FourierForm& F, const FormConfig& cfg) {
  return pullback(f.inverse(), F, cfg);
}

std::complex<double> pairing(const FourierForm& F, const FourierForm& G) {
  require_same_torus(F, G);
  const int k = F.k();
  const Bidegree a = F.bidegree(), b = G.bidegree();
  if (a.p + b.p != k || a.q + b.q != k) throw Error("pairing needs complementary bidegrees");
  const WedgeTable& t = wedge_table(k, a, b);
  std::complex<double> s = 0.0;
  const FourierForm& small = F.mode_count() <= G.mode_count() ? F : G;
  const bool f_small = &small == &F;
  for (const auto& [m, c] : small.coefficients()) {
    const FourierForm& other = f_small ? G : F;
    auto it = other.coefficients().find(negate(m));
    if (it == other.coefficients().end()) continue;
    const Eigen::VectorXcd& x = f_small ? c : it->second;
    const Eigen::VectorXcd& y = f_small ? it->second : c;
    for (int i1 = 0; i1 < t.n1; ++i1) {
      if (x(i1) == 0.0) continue;
      for (int i2 = 0; i2 < t.n2; ++i2) {
        const auto& e = t.at(i1, i2);
        if (e.out >= 0) s += static_cast<double>(e.sign) * x(i1) * y(i2);
      }
    }
  }
  return s * F.torus()->top_integral();
}

double mass(const FourierForm& F) {
  const Bidegree b = F.bidegree();
  if (b.p != b.q) throw Error("mass needs a (p,p)-form");
  return pairing(F, FourierForm::omega_power(F.torus(), F.k() - b.p)).real();
}

FourierForm harmonic_part(const FourierForm& F, double tol) {
  if (d_residual(F) > tol) throw Error("form is not closed");
  return FourierForm::constant(F.torus(), F.bidegree(), F.coefficient(zero_mode(F.k())));
}

Eigen::VectorXd class_coordinates(const FourierForm& F) {
  const Bidegree b = F.bidegree();
  if (b.p != b.q) throw Error("class coordinates need a (p,p)-form");
  return real_coordinates(F.k(), b.p, F.coefficient(zero_mode(F.k())));
}

double c_minus_l(const FourierForm& F, double l) {
  double r = 0.0;
  for (const auto& [m, c] : F.coefficients()) r = std::max(r, c.norm() * std::pow(1.0 + mode_norm(m), -l));
  return r;
}

double c_l(const FourierForm& F, double l) {
  double r = 0.0;
  for (const auto& [m, c] : F.coefficients()) r += c.norm() * std::pow(1.0 + mode_norm(m), l);
  return r;
}

namespace {

// Simple positive (s,s)-covectors i b_1 ^ conj(b_1) ^ ... built from the frame
// {e_l, e_l + e_j, e_l + i e_j}.
std::vector<Eigen::VectorXcd> positive_test_covectors(int k, int s) {
  std::vector<Eigen::VectorXcd> frame;
  for (int l = 0; l < k; ++l) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(k);
    v(l) = 1.0;
    frame.push_back(v);
  }
  for (int l = 0; l < k; ++l)
    for (int j = l + 1; j < k; ++j) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(k);
      v(l) = 1.0;
      v(j) = 1.0;
      frame.push_back(v);
      v(j) = std::complex<double>(0.0, 1.0);
      frame.push_back(v);
    }
  std::vector<Eigen::VectorXcd> out;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(pick.size()) == s) {
      Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
      int deg = 0;
      for (int idx : pick) {
        const Eigen::VectorXcd& bvec = frame[idx];
        // i b ^ conj(b) = i sum_{l,j} b_l conj(b_j) dz_l ^ dzbar_j
        Eigen::VectorXcd cov(k * k);
        for (int l = 0; l < k; ++l)
          for (int j = 0; j < k; ++j) cov(l * k + j) = std::complex<double>(0.0, 1.0) * bvec(l) * std::conj(bvec(j));
        acc = wedge_covectors(k, {deg, deg}, acc, {1, 1}, cov);
        ++deg;
      }
      if (acc.norm() > 1e-12) out.push_back(acc);
      return;
    }
    for (int i = start; i < static_cast<int>(frame.size()); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

double positivity_constant(const FourierForm& F, const NormOptions& opt, bool offset_grid) {
  const int k = F.k();
  const int p = F.bidegree().p;
  if (F.bidegree().q != p) throw Error("positivity needs a (p,p)-form");
  if (F.mode_count() == 0) return 0.0;
  const int n = 2 * k;
  int g = opt.grid_per_direction;
  while (g > 1 && std::pow(static_cast<double>(g), n) > static_cast<double>(opt.grid_cap)) --g;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= g;

  // Per grid point: the constant needed there.
  std::vector<Eigen::VectorXcd> tests;
  std::vector<double> omega_vals;
  const std::complex<double> itop = i_power(-(k * k));
  if (p >= 2) {
    tests = positive_test_covectors(k, k - p);
    Eigen::VectorXcd om = omega_power_covector(k, p);
    for (const auto& tv : tests) omega_vals.push_back((wedge_covectors(k, {p, p}, om, {k - p, k - p}, tv)(0) * itop).real());
  }
  double C = 0.0;
  Eigen::VectorXd x(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int i = 0; i < n; ++i) {
      x(i) = (static_cast<double>(r % g) + (offset_grid ? 0.5 : 0.0)) / g;
      r /= g;
    }
    Eigen::VectorXcd v = F.evaluate(x);
    if (p == 0) {
      C = std::max(C, -v(0).real());
    } else if (p == 1) {
      Eigen::MatrixXcd h(k, k);
      for (int l = 0; l < k; ++l)
        for (int j = 0; j < k; ++j) h(l, j) = v(l * k + j) * std::complex<double>(0.0, -1.0);
      Eigen::MatrixXcd hh = 0.5 * (h + h.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hh, Eigen::EigenvaluesOnly);
      C = std::max(C, -2.0 * es.eigenvalues()(0));
    } else {
      for (std::size_t t = 0; t < tests.size(); ++t) {
        double val = (wedge_covectors(k, {p, p}, v, {k - p, k - p}, tests[t])(0) * itop).real();
        C = std::max(C, -val / omega_vals[t]);
      }
    }
  }
  return std::max(C, 0.0);
}

NormReport norms(const FourierForm& F, const std::vector<double>& l_list, const NormOptions& opt) {
  NormReport r;
  for (double l : l_list) {
    r.c_l.emplace_back(l, c_l(F, l));
    r.c_minus_l.emplace_back(l, c_minus_l(F, l));
  }
  const Bidegree b = F.bidegree();
  if (b.p != b.q) {
    r.star_surrogate = std::numeric_limits<double>::quiet_NaN();
    r.certified = false;
    r.star_flag = "undefined for bidegree (p,q) with p != q";
    return r;
  }
  r.mass = mass(F);
  double C = positivity_constant(F, opt, false);
  double C_off = positivity_constant(F, opt, true);
  r.certified = C_off <= C * (1.0 + 1e-6) + 1e-12 * std::max(1.0, F.max_coefficient());
  r.positivity_constant = std::max(C, C_off);
  if (!r.certified) r.star_flag = "upper bound only";
  const double om_mass = mass(FourierForm::omega_power(F.torus(), b.p));
  r.star_surrogate = r.mass + 2.0 * r.positivity_constant * om_mass;
  return r;
}

std::vector<FourierForm> star_bounded_family(std::shared_ptr<const Torus> torus, int p, std::size_t count,
                                             double bound, std::uint64_t seed, int max_mode, int terms,
                                             const NormOptions& opt) {
  const int k = torus->k();
  if (p < 1 || p > k) throw Error("p out of range");
  if (!(bound > 0.0)) throw Error("bound must be positive");
  const int h = static_cast<int>(class_coordinates(FourierForm::omega_power(torus, p)).size());
  std::vector<FourierForm> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    Eigen::VectorXd c(h);
    for (int j = 0; j < h; ++j) c(j) = rng.normal();
    FourierForm F = FourierForm::from_real_coordinates(torus, p, c);
    for (int t = 0; t < terms; ++t) {
      Mode m(static_cast<std::size_t>(2 * k));
      bool nonzero = false;
      while (!nonzero) {
        for (auto& v : m) v = rng.integer(-max_mode, max_mode);
        nonzero = std::any_of(m.begin(), m.end(), [](long long v) { return v != 0; });
      }
      FourierForm phi = FourierForm::cos_mode(torus, m, rng.normal());
      for (int q = 1; q < p; ++q) phi = wedge(phi, FourierForm::omega_power(torus, 1));
      F += ddc(phi);
    }
    const double star = norms(F, {}, opt).star_surrogate;
    if (!(star > 0.0)) throw Error("degenerate family member");
    out.push_back((bound / star) * F);
  }
  return out;
}

double interpolation_constant(const std::vector<FourierForm>& family, double l, double l_prime, bool* lower_holds) {
  if (!(l > 0.0) || !(l_prime > l)) throw Error("need 0 < l < l'");
  double c = 0.0;
  bool lower = true;
  for (const auto& F : family) {
    const double a = c_minus_l(F, l), b = c_minus_l(F, l_prime);
    lower = lower && b <= a * (1.0 + 1e-12);
    if (b > 0.0) c = std::max(c, a / std::pow(b, l / l_prime));
  }
  if (lower_holds) *lower_holds = lower;
  return c;
}

InterpolationFit interpolation_check(std::shared_ptr<const Torus> torus, int p, double l, double l_prime,
                                     double bound, std::size_t count, std::uint64_t seed, const NormOptions& opt) {
  InterpolationFit fit;
  fit.l = l;
  fit.l_prime = l_prime;
  fit.family_size = count;
  auto big = star_bounded_family(torus, p, 2 * count, bound, seed, 4, 3, opt);
  std::vector<FourierForm> small(big.begin(), big.begin() + static_cast<std::ptrdiff_t>(count));
  bool a = false, b = false;
  fit.c = interpolation_constant(small, l, l_prime, &a);
  fit.c_doubled = interpolation_constant(big, l, l_prime, &b);
  fit.lower_holds = a && b;
  fit.drift = fit.c > 0.0 ? fit.c_doubled / fit.c : std::numeric_limits<double>::infinity();
  fit.stable = fit.drift < 2.0;
  return fit;
}

}  // namespace kahlerdyn
