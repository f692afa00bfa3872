// Spectral profiles of an invertible real matrix L: eigenvalue clusters,
// Jordan structure, dominant spaces, normalized powers and the Cesaro
// limit projector onto the strictly dominant space.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahlerdyn/real_matrix.hpp"

namespace kahlerdyn {

struct EigenCluster {
  std::complex<double> value;
  int algebraic = 1;
  std::vector<int> jordan_sizes;  // descending
};

struct ThetaGroup {
  enum class Kind { Finite, Torus, Undetermined };
  Kind kind = Kind::Finite;
  long long order = 1;  // Finite only
  int torus_rank = 0;   // Torus only
  std::string description;
};

struct SpectralProfile {
  int dim = 0;
  double tol = 1e-9;
  std::vector<EigenCluster> eigenvalues;  // dominance order
  std::vector<std::vector<int>> modulus_clusters;  // indices into eigenvalues
  double spectral_radius = 0.0;
  int multiplicity_m = 1;
  std::vector<std::complex<double>> dominant_eigenvalues;
  Eigen::MatrixXd F_basis;  // orthonormal columns
  Eigen::MatrixXd H_basis;  // orthonormal columns, subspace of span(F_basis)
  std::vector<double> theta;  // arguments in (-pi, pi]
  ThetaGroup theta_group;
  bool near_tie = false;
  bool exact_path = false;
  std::vector<std::string> warnings;

  int nu() const { return static_cast<int>(dominant_eigenvalues.size()); }
};

struct ProjectorResult {
  Eigen::MatrixXd projector;
  long long N_used = 0;
  double residual = 0.0;
  bool converged = false;
  double image_residual = 0.0;   // ||(I - Pi_H) P||
  int rank = 0;
  double equivariance_residual = 0.0;  // ||P L - lambda P||
  std::vector<std::pair<long long, double>> raw_gaps;  // (N, ||L_N - P||)
};

constexpr int kDefaultDenomBound = 64;

/// Throws Error("not an automorphism action") when L is singular.
SpectralProfile compute_spectral_profile(const RealMatrix& L, double tol = 1e-9,
                                         int denom_bound = kDefaultDenomBound);

/// n^{1-m} lambda^{-n} L^n, computed by log-scaled repeated squaring.
Eigen::MatrixXd normalized_iterate(const RealMatrix& L, const SpectralProfile& profile, long long n);

/// (1/N) sum_{n=1}^N L^n / (n^{m-1} lambda^n).
Eigen::MatrixXd cesaro_operator(const RealMatrix& L, const SpectralProfile& profile, long long N);

/// Cesaro averages sampled at multiples of the Theta order and extrapolated in
/// N; stops when consecutive extrapolations differ by less than tol.
ProjectorResult limit_projector(const RealMatrix& L, const SpectralProfile& profile, double tol,
                                long long N_max);

ThetaGroup dominant_direction_group(const SpectralProfile& profile, int denom_bound);
ThetaGroup classify_theta(const std::vector<double>& theta, int denom_bound);

/// Orthogonal projector onto the column span of an orthonormal basis.
Eigen::MatrixXd span_projector(const Eigen::MatrixXd& basis);

}  // namespace kahlerdyn
