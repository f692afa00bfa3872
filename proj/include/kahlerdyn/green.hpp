// Green currents as limits of normalized pullbacks, equilibrium measures,
// correlations and exponential integrability of log-singular functions.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/forms.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

struct IterationRun {
  TorusSpec map;
  FourierForm S0;
  int q = 0;
  int m = 1;
  double d_q = 1.0;
  std::vector<double> step_distances;   // c_{-2}(S_n - S_{n-1}), n = 2..
  std::vector<double> limit_distances;  // c_{-2}(S_n - limit), n = 1..
  FourierForm limit;
  FourierForm final_iterate;  // last normalized pullback (or Cesaro average)
  Eigen::VectorXd limit_class;  // g-basis coordinates
  double class_F_residual = 0.0;  // distance of the limit class to F
  double fitted_rate = 0.0;       // geometric rate of limit_distances
  double dropped_mass_total = 0.0;
  int n_used = 0;
  bool truncated = false;

  IterationRun(TorusSpec map_, FourierForm S0_) : map(std::move(map_)), S0(S0_), limit(S0_), final_iterate(S0_) {}
};

/// Normalized pullbacks n^{1-m} d_q^{-n} (f^n)^* S0, n = 1..n_max. The limit
/// is the harmonic part of the last iterate.
IterationRun iterate_green(const TorusMap& f, const FourierForm& S0, int n_max, const FormConfig& cfg = {});

/// Cesaro averages (1/N) sum_{n<=N} of the normalized pullbacks. The limit is
/// the constant form whose class is the Cesaro projector applied to [S0].
IterationRun cesaro_green(const TorusMap& f, const FourierForm& S0, int N_max, const FormConfig& cfg = {});

struct UniquenessResult {
  double distance = 0.0;  // c_{-2} distance of the final normalized iterates
  double limit_distance = 0.0;
  bool passed = false;    // distance < 1e-7
};

/// Throws Error("class mismatch") or Error("S0 is not positive").
UniquenessResult uniqueness_experiment(const TorusMap& f, const FourierForm& S0, const FourierForm& S0_prime, int n_max,
                                       const FormConfig& cfg = {});

/// omega^q + dd^c(phi_i) with phi_i a few real cosine modes (|m|_inf <= max_mode)
/// times omega^{q-1}; amplitudes are halved until the form is grid-positive.
std::vector<FourierForm> random_positive_perturbations(std::shared_ptr<const Torus> torus, int q, std::size_t count,
                                                       std::uint64_t seed, double amplitude = 0.02,
                                                       int max_mode = 2, int terms = 2);

/// Largest coefficient of d_q^{-1} f^* T - T.
double functional_equation_residual(const TorusMap& f, const FourierForm& T, double d_q);

struct MeasureDensity {
  FourierForm density;  // (k,k)-form
  double mass = 0.0;
  double nonneg_certificate = 0.0;  // grid minimum of the density function
  double invariance_residual = 0.0;
  bool invariant = false;
  std::string flag;  // "zero measure" when T_minus or T_plus vanish

  explicit MeasureDensity(FourierForm d) : density(std::move(d)) {}
  /// Density against Lebesgue measure on [0,1)^{2k}.
  double value(const Eigen::VectorXd& x) const;
};

/// T_plus ^ T_minus. Throws Error when criterion_holds and the mass vanishes.
MeasureDensity equilibrium_measure(const TorusMap& f, const FourierForm& T_plus, const FourierForm& T_minus,
                                   bool criterion_holds = false);

struct CorrelationRun {
  std::vector<std::complex<double>> C;  // n = 0..n_max
  int n0 = -1;  // first n with C_j = 0 exactly for all j >= n (-1: none)
  bool tail_zero = false;
};

/// C_n = <mu, (phi o f^n) psi> - |mu|^{-1} <mu, phi><mu, psi>, by character calculus.
CorrelationRun mixing_correlations(const MeasureDensity& mu, const TorusMap& f, const FourierForm& phi,
                                   const FourierForm& psi, int n_max, const FormConfig& cfg = {});

/// u(x) = min(log(dist(x, a) / r0), 0) with the flat torus distance.
struct LogSingularFunction {
  Eigen::VectorXd a;  // lattice coordinates
  double r0 = 0.1;
  double scale = 1.0;  // u is divided by this
};

double torus_distance(const Torus& X, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Half the length of the shortest nonzero lattice vector.
double half_systole(const Torus& X);
double evaluate(const Torus& X, const LogSingularFunction& u, const Eigen::VectorXd& x);
/// L1 norm plus grid mass of the discrete Laplacian.
double dsh_surrogate(const Torus& X, const LogSingularFunction& u, int grid = 16);
/// Haar integral of exp(lambda |u|) in closed form.
double haar_exponential_integral(const Torus& X, const LogSingularFunction& u, double lambda);

struct ModerateCell {
  std::size_t u_index = 0;
  double lambda = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  bool inconclusive = false;
  std::string flag;
};

struct ModerateReport {
  std::vector<ModerateCell> cells;
  double lambda_max = 0.0;  // largest lambda with all cells conclusive
  double bound = 0.0;       // sup of the values for lambda <= lambda_max
  bool finite = true;
};

/// Monte Carlo <mu, exp(lambda |u|)> / |mu| with standard errors; each u is
/// rescaled so that its DSH surrogate is at most 1.
ModerateReport moderate_check(const MeasureDensity& mu, std::vector<LogSingularFunction> u_family,
                              const std::vector<double>& lambda_grid, long long samples, std::uint64_t seed,
                              int workers = 0);

}  // namespace kahlerdyn
