// alpha-normalized potentials and super-potentials of smooth closed forms on
// a torus, the pullback recursion, Green-current series and the
// super-potential definition of the wedge product.
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/forms.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

struct NormalizationBasis {
  int p = 0;
  std::vector<FourierForm> alpha;       // closed real (p,p)-forms, independent classes
  std::vector<FourierForm> alpha_dual;  // constant (k-p,k-p)-forms, <alpha_i, alpha_dual_j> = delta_ij

  NormalizationBasis() = default;
  /// Computes alpha_dual; throws Error when alpha is not closed, not real or
  /// the classes are dependent.
  explicit NormalizationBasis(std::vector<FourierForm> alpha);
  /// Constant g-basis of H^{p,p}.
  static NormalizationBasis standard(std::shared_ptr<const Torus> torus, int p);
  /// alpha_i + dd^c phi_i (phi_i real (p-1,p-1)), same classes.
  NormalizationBasis perturbed(const std::vector<FourierForm>& phi) const;

  int h() const { return static_cast<int>(alpha.size()); }
  int k() const;
  const std::shared_ptr<const Torus>& torus() const;
  /// Columns: g-basis coordinates of [alpha_j].
  Eigen::MatrixXd class_matrix() const;
  /// Coordinates of [S] in the basis [alpha].
  Eigen::VectorXd coordinates(const FourierForm& S) const;
  /// max |<alpha_i, alpha_dual_j> - delta_ij|.
  double duality_defect() const;
};

/// Potential U of R with dd^c U = R, minimal norm per mode and
/// <U, alpha_i> = 0. Throws Error("R has nonzero class") or
/// Error("R not dd^c-exact").
FourierForm solve_ddc(const FourierForm& R, const NormalizationBasis& basis);
/// Same with the standard constant basis of the complementary degree.
FourierForm solve_ddc(const FourierForm& R);

/// <S, U_R>.
double superpotential_value(const FourierForm& S, const FourierForm& R, const NormalizationBasis& basis);

struct SpIterate {
  double direct = 0.0;
  double recursion = 0.0;
  std::vector<double> terms;  // l = 0..n-1, then the U_S o Lambda^n term
  double scale = 0.0;
  double dropped = 0.0;
  bool agree = false;
};

/// U_{(f^n)^* S}(R) directly and through
///   sum_l (U o Lambda^l) M^{n-l-1} A + U_S o Lambda^n.
SpIterate sp_iterate(const FourierForm& S, const TorusMap& f, int n, const FourierForm& R,
                     const NormalizationBasis& basis, const FormConfig& cfg = {});

struct GreenSeries {
  std::shared_ptr<const TorusMap> map;
  NormalizationBasis basis;
  std::vector<FourierForm> pulled_alpha;  // f^* alpha_j, super-potentials U_j
  Eigen::MatrixXd M;                      // f^* on H^{q,q} in the basis [alpha]
  Eigen::VectorXd c;                      // class in the basis [alpha]
  double d_q = 1.0;
  double delta = 1.0;
  FormConfig cfg;
};

/// delta defaults to sqrt(d_{q-1} d_q).
GreenSeries make_green_series(const TorusMap& f, const NormalizationBasis& basis, const Eigen::VectorXd& c,
                              std::optional<double> delta = std::nullopt, const FormConfig& cfg = {});

struct SeriesValue {
  double value = 0.0;
  int terms_used = 0;
  double kappa = 0.0;      // envelope constant of |term_l| / (delta/d_q)^l
  double tail_bound = 0.0;
};

/// sum_{l>=0} (U o Lambda^l) M^{-l-1} c, stopped when the geometric tail
/// bound kappa (delta/d_q)^{L+1} / (1 - delta/d_q) is below tol.
SeriesValue green_series_eval(const GreenSeries& series, const FourierForm& R, double tol = 1e-10, int max_terms = 200);

/// lambda = -log rho / (log kappa - log rho), kappa > 1, 0 < rho < 1.
double holder_exponent(double kappa, double rho);
/// max over the family of c_{-1}(Lambda R) / c_{-1}(R).
double fit_kappa(const TorusMap& f, const std::vector<FourierForm>& family, const FormConfig& cfg = {});
/// Least-squares slope of log |U| against log x over the points (x, |U|)
/// with |U| > 0; NaN with fewer than two such points.
double holder_fit(const std::vector<std::pair<double, double>>& points);

/// U_S(dd^c Phi ^ S') + sum_i a_i <alpha_i, Phi ^ S'>.
double wedge_sp(const FourierForm& S, const FourierForm& S_prime, const FourierForm& Phi,
                const NormalizationBasis& basis, const FormConfig& cfg = {});

/// Star-normalized dd^c(cos(2 pi m.x) omega^{k-p}) for m on the coordinate
/// axes and the diagonal up to max_norm, plus all |m|_inf <= small_box.
std::vector<FourierForm> probe_family(std::shared_ptr<const Torus> torus, int p, int max_norm, int small_box = 1,
                                      const NormOptions& opt = {});

struct SweepResult {
  double c = 0.0;
  std::vector<std::pair<double, double>> table;  // (c_1(R), |U_S(R)|)
  double c_extended = 0.0;
  bool stable = true;  // c_extended < 2 c
};

SweepResult main_estimate_sweep(const FourierForm& S, const std::vector<FourierForm>& family,
                                const NormalizationBasis& basis,
                                const std::vector<FourierForm>& extension = {});

}  // namespace kahlerdyn
