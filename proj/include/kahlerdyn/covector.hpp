// Constant (p,q)-covectors on C^k in the basis dz_I ^ dzbar_J, with I, J
// increasing index sets stored as bitmasks in lexicographic order. The flat
// index of (I, J) is index(I) * C(k, q) + index(J).
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace kahlerdyn {

struct Bidegree {
  int p = 0;
  int q = 0;
  friend bool operator==(Bidegree a, Bidegree b) { return a.p == b.p && a.q == b.q; }
  friend bool operator!=(Bidegree a, Bidegree b) { return !(a == b); }
};

long long binomial(int n, int r);
/// Increasing index subsets of size r of {0..k-1}, lexicographic.
const std::vector<unsigned>& combinations(int k, int r);
int combination_index(int k, unsigned mask);
int popcount(unsigned mask);

int covector_dim(int k, Bidegree b);

/// Sign of dz_a ^ dz_b = sign * dz_{a|b}; 0 when the sets overlap.
int merge_sign(unsigned a, unsigned b);

struct WedgeEntry {
  int out = -1;  // -1 when the product vanishes
  int sign = 0;
};

/// Table for basis(b1) x basis(b2) -> basis(b1 + b2), row-major in (i1, i2).
struct WedgeTable {
  int k = 0;
  Bidegree b1, b2, out;
  int n1 = 0, n2 = 0;
  std::vector<WedgeEntry> entries;
  const WedgeEntry& at(int i1, int i2) const { return entries[static_cast<std::size_t>(i1) * n2 + i2]; }
};

/// Cached per (k, b1, b2). Throws Error on bidegree overflow.
const WedgeTable& wedge_table(int k, Bidegree b1, Bidegree b2);

/// Wedge of two constant covectors.
Eigen::VectorXcd wedge_covectors(int k, Bidegree b1, const Eigen::VectorXcd& x, Bidegree b2,
                                 const Eigen::VectorXcd& y);

/// Compound matrix C_r(A)[I, K] = det A[I, K].
Eigen::MatrixXcd compound(const Eigen::MatrixXcd& A, int r);

/// Coefficient transform of the pullback by the linear map z -> A z:
/// kron(C_p(A)^T, conj(C_q(A))^T).
Eigen::MatrixXcd covector_pullback_matrix(const Eigen::MatrixXcd& A, Bidegree b);

/// Raw coefficients of the constant real (p,p)-forms g_a, as columns. The
/// real basis f_IJ = i^{p^2} dz_I ^ dzbar_J satisfies conj(f_IJ) = f_JI; then
/// g = f_II, g = f_IJ + f_JI at (I,J) with I < J, g = i (f_IJ - f_JI) at (J,I).
Eigen::MatrixXcd real_basis_matrix(int k, int p);
/// Coordinates of a real (p,p)-covector in the g-basis.
Eigen::VectorXd real_coordinates(int k, int p, const Eigen::VectorXcd& raw);

/// Raw coefficients of omega^q, omega = (i/2) sum dz_l ^ dzbar_l.
Eigen::VectorXcd omega_power_covector(int k, int q);

/// Flat index of the conjugate basis element (J, I) for (p,p) and the sign
/// conj(dz_I ^ dzbar_J) = sign * dz_J ^ dzbar_I, sign = (-1)^{pq}.
int conjugate_index(int k, Bidegree b, int idx);

}  // namespace kahlerdyn
