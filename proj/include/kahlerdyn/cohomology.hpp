// Actions of an automorphism on the groups H^{q,q}: dynamical degrees,
// log-concavity, cup-product duality, the mixing criterion and mass growth.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/real_matrix.hpp"
#include "kahlerdyn/spectral.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

struct CohomologyModel {
  int k = 0;
  std::vector<RealMatrix> M;              // f^* on H^{q,q}, q = 0..k
  std::vector<Eigen::MatrixXd> P;         // cup product H^{q,q} x H^{k-q,k-q} -> R
  std::vector<Eigen::VectorXd> omega_class;  // [omega^q]
  std::string label;

  int h(int q) const { return M[static_cast<std::size_t>(q)].rows(); }
  /// Structural invariants: sizes, h_0 = h_k = 1, M_0 = M_k = [1], P_q nondegenerate.
  void validate() const;
};

/// f^* on constant real (q,q)-forms in the g-basis; P_q by integration over X.
CohomologyModel build_torus_cohomology(const TorusMap& f);
CohomologyModel build_torus_cohomology(const TorusSpec& spec);

/// Model of f^{-1}: M_q inverted, pairings and classes unchanged.
CohomologyModel inverse_model(const CohomologyModel& model);

/// Kunneth sub-model on X x Y spanned by H^{a,a}(X) (x) H^{b,b}(Y).
CohomologyModel kunneth_product(const CohomologyModel& x, const CohomologyModel& y);

/// Torus X x Y with the map (A_x, A_y), lattices concatenated.
TorusSpec product_torus_spec(const TorusSpec& x, const TorusSpec& y);

/// Random automorphism of the standard torus (Z[i])^k built from elementary
/// Gaussian-integer moves; deterministic in seed.
TorusSpec random_automorphism_spec(int k, std::uint64_t seed, int moves = 6);

struct DegreeProfile {
  std::vector<double> degrees;
  std::vector<int> multiplicity;
  int p = 0;
  int p_prime = 0;
  double entropy = 0.0;
  std::vector<double> limit_estimate;  // <M_q^n w_q, P_q w_{k-q}>^{1/n}
  std::vector<int> limit_n;
  std::vector<double> limit_gap;
  double tol = 1e-9;
};

DegreeProfile dynamical_degrees(const CohomologyModel& model, double tol = 1e-9, int limit_n = 60);
/// Profile from raw degrees (limit estimates left empty).
DegreeProfile degree_profile_from(const std::vector<double>& degrees, double tol = 1e-9);

struct ConcavityVerdict {
  int p = 0;
  int p_prime = 0;
};

/// Throws Error("log-concavity violated at q=<q>") on failure.
ConcavityVerdict check_log_concavity(const DegreeProfile& profile, double tol = 1e-9);

struct DualityResult {
  int q = 0;
  double residual = 0.0;
  Eigen::MatrixXd pushforward_in_dual_basis;
  bool radius_match = true;
  bool multiplicity_match = true;
};

/// f_* on H^{k-q,k-q} written in the P_q-dual basis against M_q^T.
DualityResult duality_check(const CohomologyModel& model, int q, double tol = 1e-9);

struct MixingReport {
  int p = 0;
  bool hypotheses_met = true;
  std::string note;
  bool cond2 = false;
  bool cond3 = false;
  bool equivalent = false;
  int multiplicity = 1;
  std::vector<std::pair<long long, double>> mass_series;  // N = 1..N_max
  double floor = 0.0;
  double fitted_limit = 0.0;
  std::vector<std::pair<long long, double>> decay_points;  // large-N samples
  double fitted_rate = 0.0;  // exponent of N in the large-N decay
  bool bounded_below = false;
};

/// Cesaro mass (1/N^2) sum_{n,l<=N} (nl)^{1-m} d_p^{-n-l} <M_p^{n+l} w_p, P_p w_{k-p}>.
double mixing_mass(const CohomologyModel& model, int p, double d_p, int m, long long N);
MixingReport mixing_criterion(const CohomologyModel& model, long long N_max = 50, long long N_decay = 2000,
                              double tol = 1e-9);

struct MassGrowth {
  int q = 0;
  std::vector<std::pair<int, double>> log_masses;  // (n, log <M_q^n c, P_q w_{k-q}>)
  double log_kappa = 0.0;
  double growth_rate = 0.0;
  double poly_degree = 0.0;
  double expected_rate = 0.0;
  int expected_poly = 0;
  bool rate_ok = false;
  bool poly_ok = false;
};

MassGrowth mass_growth(const CohomologyModel& model, int q, const Eigen::VectorXd& class_S, int n_min, int n_max,
                       double tol = 1e-6);

}  // namespace kahlerdyn
