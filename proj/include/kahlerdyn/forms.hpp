// Truncated Fourier series of smooth forms on a complex torus:
//   F(x) = sum_m F_m e_m(x),  e_m(x) = exp(2 pi i m.x),
// with F_m a constant covector in the dz_I ^ dzbar_J basis.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/covector.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

using Mode = std::vector<long long>;

struct FormConfig {
  long long box = 1LL << 40;  // modes with |m|_inf above this are dropped
  double drop_budget = 1e-8;  // relative to the input coefficient mass
};

class FourierForm {
 public:
  using Coefficients = std::map<Mode, Eigen::VectorXcd>;

  FourierForm(std::shared_ptr<const Torus> torus, Bidegree b);

  static FourierForm constant(std::shared_ptr<const Torus> torus, Bidegree b, const Eigen::VectorXcd& c);
  static FourierForm single_mode(std::shared_ptr<const Torus> torus, Bidegree b, const Mode& m,
                                 const Eigen::VectorXcd& c);
  /// Real function a cos(2 pi m.x).
  static FourierForm cos_mode(std::shared_ptr<const Torus> torus, const Mode& m, double amplitude);
  /// Real function a sin(2 pi m.x).
  static FourierForm sin_mode(std::shared_ptr<const Torus> torus, const Mode& m, double amplitude);
  static FourierForm omega_power(std::shared_ptr<const Torus> torus, int q);
  /// Constant real (p,p)-form with the given g-basis coordinates.
  static FourierForm from_real_coordinates(std::shared_ptr<const Torus> torus, int p, const Eigen::VectorXd& coords);

  const std::shared_ptr<const Torus>& torus() const { return torus_; }
  int k() const { return torus_->k(); }
  Bidegree bidegree() const { return bidegree_; }
  int dim() const { return dim_; }
  const Coefficients& coefficients() const { return coeffs_; }
  std::size_t mode_count() const { return coeffs_.size(); }
  Eigen::VectorXcd coefficient(const Mode& m) const;
  void add(const Mode& m, const Eigen::VectorXcd& c);
  long long radius() const;

  /// Coefficient norm mass discarded by truncations that produced this form.
  double dropped_mass() const { return dropped_; }
  void add_dropped(double v) { dropped_ += v; }
  void set_dropped(double v) { dropped_ = v; }

  FourierForm& operator+=(const FourierForm& o);
  FourierForm& operator-=(const FourierForm& o);
  FourierForm& operator*=(std::complex<double> s);
  friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
  friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
  friend FourierForm operator*(std::complex<double> s, FourierForm a) { return a *= s; }
  friend FourierForm operator*(double s, FourierForm a) { return a *= std::complex<double>(s, 0.0); }

  /// Drops modes whose coefficient norm is at most eps.
  FourierForm pruned(double eps) const;
  FourierForm conjugate() const;
  /// Max over modes of |F_{-m} - conj-dual(F_m)| relative to the largest coefficient.
  double reality_defect() const;
  bool is_real(double tol = 1e-10) const { return reality_defect() <= tol; }
  /// (F + conj F) / 2 for (p,p)-forms.
  FourierForm real_part() const;

  Eigen::VectorXcd evaluate(const Eigen::VectorXd& x) const;
  /// sqrt(sum_m |F_m|^2).
  double coefficient_norm() const;
  double max_coefficient() const;

 private:
  std::shared_ptr<const Torus> torus_;
  Bidegree bidegree_;
  int dim_;
  Coefficients coeffs_;
  double dropped_ = 0.0;
};

double mode_norm(const Mode& m);
Mode negate(const Mode& m);
Mode zero_mode(int k);

FourierForm wedge(const FourierForm& F, const FourierForm& G, const FormConfig& cfg = {});
FourierForm del(const FourierForm& F);
FourierForm delbar(const FourierForm& F);
/// (i/pi) del delbar.
FourierForm ddc(const FourierForm& F);
/// Largest coefficient of dF relative to the largest coefficient of F (0 for F = 0).
double d_residual(const FourierForm& F);

/// f^* F. Modes leaving the configured box are dropped and their norm
/// accumulated in the result's dropped mass.
FourierForm pullback(const TorusMap& f, const FourierForm& F, const FormConfig& cfg = {});
/// f_* F = (f^{-1})^* F.
FourierForm pushforward(const TorusMap& f, const FourierForm& F, const FormConfig& cfg = {});

/// Integral over X of F ^ G for complementary bidegrees.
std::complex<double> pairing(const FourierForm& F, const FourierForm& G);
/// Re <F, omega^{k-p}> for a (p,p)-form.
double mass(const FourierForm& F);

/// Mode-0 part; throws Error("form is not closed") when d_residual > tol.
FourierForm harmonic_part(const FourierForm& F, double tol = 1e-9);
/// g-basis coordinates of the mode-0 part of a real (p,p)-form.
Eigen::VectorXd class_coordinates(const FourierForm& F);

struct NormOptions {
  int grid_per_direction = 16;
  long long grid_cap = 1LL << 16;
};

struct NormReport {
  double mass = 0.0;
  double star_surrogate = 0.0;
  double positivity_constant = 0.0;
  bool certified = true;
  std::string star_flag;  // empty or "upper bound only"
  std::vector<std::pair<double, double>> c_l;
  std::vector<std::pair<double, double>> c_minus_l;
};

double c_minus_l(const FourierForm& F, double l);
double c_l(const FourierForm& F, double l);

/// Smallest C (on the grid) with F + C omega^p pointwise positive, F real (p,p).
double positivity_constant(const FourierForm& F, const NormOptions& opt, bool offset_grid = false);

NormReport norms(const FourierForm& F, const std::vector<double>& l_list, const NormOptions& opt = {});

/// Random real (p,p)-forms (constant part plus dd^c of a few cosine modes with
/// |m|_inf <= max_mode), each rescaled to star_surrogate == bound.
std::vector<FourierForm> star_bounded_family(std::shared_ptr<const Torus> torus, int p, std::size_t count,
                                             double bound, std::uint64_t seed, int max_mode = 4, int terms = 3,
                                             const NormOptions& opt = {8, 1LL << 16});

struct InterpolationFit {
  double l = 1.0;
  double l_prime = 2.0;
  std::size_t family_size = 0;
  double c = 0.0;          // max of c_{-l} / c_{-l'}^{l/l'} over the family
  double c_doubled = 0.0;  // same on a family twice as large
  double drift = 0.0;      // c_doubled / c
  bool lower_holds = false;  // c_{-l'} <= c_{-l} on both families
  bool stable = false;       // drift < 2
};

/// Fits c in c_{-l'} <= c_{-l} <= c (c_{-l'})^{l/l'} for 0 < l < l'.
double interpolation_constant(const std::vector<FourierForm>& family, double l, double l_prime,
                              bool* lower_holds = nullptr);
InterpolationFit interpolation_check(std::shared_ptr<const Torus> torus, int p, double l, double l_prime,
                                     double bound, std::size_t count, std::uint64_t seed,
                                     const NormOptions& opt = {8, 1LL << 16});

}  // namespace kahlerdyn
