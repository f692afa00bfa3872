// Bowen balls, entropy estimates, Lyapunov exponents and ball-mass bounds for
// affine torus automorphisms.
//
// Bowen balls use the sup-norm in a fixed real basis V of R^{2k}: the unit
// eigenvectors of the real derivative when it is diagonalizable over R, the
// standard basis otherwise. In the eigenbasis a Bowen ball is a box.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

struct BowenQuery {
  TorusSpec map;
  int n = 0;
  double epsilon = 0.05;
  Eigen::VectorXd center;  // lattice coordinates; empty means 0
};

struct BowenBasis {
  Eigen::MatrixXd V;            // columns: unit basis vectors in real coordinates
  Eigen::VectorXd log_stretch;  // log|lambda_j| (eigenbasis only)
  bool eigen = false;
};

/// Eigenbasis of the real derivative, or the standard basis when the
/// derivative is not diagonalizable over R.
BowenBasis bowen_basis(const TorusMap& f, double tol = 1e-9);

/// Throws Error("epsilon exceeds the embedding radius") unless the eps-box of
/// the basis fits inside a ball of half the systole.
void check_bowen_epsilon(const TorusMap& f, const BowenBasis& basis, double epsilon);

/// log of the Haar probability of the box Bowen ball. Throws
/// Error("use monte-carlo") when the derivative is not diagonalizable over R.
double bowen_ball_log_volume(const BowenQuery& q);

struct BowenMonteCarlo {
  double log_volume = 0.0;
  double fraction = 0.0;  // nu(B_n) / nu(B_0)
  double std_error = 0.0; // of the fraction
  long long hits = 0;
  long long samples = 0;
};

/// Uniform samples in B_0(a, eps); counts those whose orbit stays eps-close
/// for n steps (torus distance, lattice translates included).
BowenMonteCarlo bowen_ball_monte_carlo(const BowenQuery& q, long long samples, std::uint64_t seed,
                                       std::uint64_t stream = 0, int workers = 0);

struct EntropyEstimate {
  double h_value = 0.0;  // -(1/n) log(nu(B_n) / nu(B_0)), averaged over centers
  double raw_value = 0.0;  // -(1/n) log nu(B_n)
  int n_used = 0;
  double epsilon = 0.0;
  std::string method;  // "exact-box" | "monte-carlo"
  double error_bar = 0.0;
  std::vector<double> per_center;
};

/// method: "auto", "exact-box" or "monte-carlo". Throws
/// Error("n too large for sample budget") when a Monte Carlo run has no hits.
EntropyEstimate brin_katok_estimate(const TorusSpec& map, int n, double epsilon,
                                    const std::vector<Eigen::VectorXd>& centers, long long samples,
                                    std::uint64_t seed = 1, const std::string& method = "auto", int workers = 0);

/// Largest local slope -(log c_{i+1} - log c_i)/(n_{i+1} - n_i) over the last
/// `window` consecutive pairs. A single entry gives -(1/n) log c.
double misiurewicz_bound(const std::vector<double>& c, const std::vector<double>& n, int window = 4);

struct LyapunovSpectrum {
  std::vector<double> exponents;  // 2k real exponents, descending
  std::vector<std::pair<double, int>> distinct;  // value, multiplicity
  double sum = 0.0;
  bool hyperbolic = false;
};

LyapunovSpectrum lyapunov_exponents(const TorusSpec& map, double tol = 1e-9);

struct DeThelinVerdict {
  int p = 0;
  double bound_plus = 0.0;   // 1/2 log(d_p / d_{p-1})
  double bound_minus = 0.0;  // 1/2 log(d_p / d_{p+1})
  int count_plus = 0;
  int count_minus = 0;
  double equality_gap = 0.0;  // smallest distance of an exponent to its bound
  bool passed = false;
  std::string details;
};

/// Complex exponents are the real ones taken in pairs. Throws
/// Error("no strictly maximal dynamical degree").
DeThelinVerdict de_thelin_check(const LyapunovSpectrum& exponents, const DegreeProfile& degrees, double tol = 1e-9);

struct YomdinReport {
  int p = 0;
  double delta = 0.0;
  std::vector<double> density;  // constant density of (f^n)^* omega^p ^ omega^{k-p}
  std::vector<double> values;   // max over centers of nu_n''(B_n) e^{-n delta}
  std::vector<double> std_error;
  double A = 0.0;
  double growth_rate = 0.0;  // log-linear slope of values
  bool bounded = false;
  bool inconclusive = false;
  std::string method;
};

/// n = 0..n_max. Exact box volumes when available, Monte Carlo otherwise.
YomdinReport yomdin_ball_mass(const TorusSpec& map, int n_max, double epsilon, double delta, long long samples,
                              std::uint64_t seed = 1, int centers = 4, int p = -1, int workers = 0);

}  // namespace kahlerdyn
