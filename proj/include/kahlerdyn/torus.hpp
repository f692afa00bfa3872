// Complex tori X = C^k / Lambda and affine automorphisms z -> A z + b.
// Points are written in lattice coordinates x in R^{2k} / Z^{2k}, with
// z = sum_j x_j v_j for the lattice basis v_0..v_{2k-1}.
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace kahlerdyn {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct TorusSpec {
  int k = 1;
  std::vector<Eigen::VectorXcd> lattice_basis;  // 2k vectors in C^k
  Eigen::MatrixXcd A;                           // k x k
  Eigen::VectorXcd translation;                 // C^k

  /// Lattice (Z[i])^k: basis e_0..e_{k-1}, i e_0..i e_{k-1}.
  static TorusSpec standard(int k, const Eigen::MatrixXcd& A,
                            const Eigen::VectorXcd& translation = Eigen::VectorXcd());
};

class Torus {
 public:
  Torus(int k, std::vector<Eigen::VectorXcd> lattice_basis);

  int k() const { return k_; }
  int real_dim() const { return 2 * k_; }
  const std::vector<Eigen::VectorXcd>& lattice_basis() const { return basis_; }
  /// Columns [Re v_j; Im v_j].
  const Eigen::MatrixXd& Lr() const { return Lr_; }
  const Eigen::MatrixXd& Lr_inv() const { return Lr_inv_; }
  /// Euclidean volume of a fundamental domain.
  double volume() const { return volume_; }
  /// d x_j / d z_l, a 2k x k matrix.
  const Eigen::MatrixXcd& dx_dz() const { return dxdz_; }
  /// Integral over X of dz_1 ^ .. ^ dz_k ^ dzbar_1 ^ .. ^ dzbar_k.
  std::complex<double> top_integral() const { return top_integral_; }
  /// Holomorphic symbol xi_l(m) = sum_j m_j dx_j/dz_l.
  Eigen::VectorXcd symbol(const std::vector<long long>& mode) const;
  /// Same lattice (basis vectors equal to 1e-12).
  bool same_as(const Torus& other) const;
  /// Point of C^k for lattice coordinates x.
  Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) const;

 private:
  int k_;
  std::vector<Eigen::VectorXcd> basis_;
  Eigen::MatrixXd Lr_, Lr_inv_;
  Eigen::MatrixXcd dxdz_;
  double volume_ = 0.0;
  std::complex<double> top_integral_;
};

/// Affine automorphism f(z) = A z + b, acting on lattice coordinates by
/// f(x) = B x + t with B integral and det B = +-1.
class TorusMap {
 public:
  /// Throws Error("not an automorphism of the torus") when A does not
  /// induce a unimodular integer matrix.
  explicit TorusMap(const TorusSpec& spec);
  TorusMap(std::shared_ptr<const Torus> torus, const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b);

  const std::shared_ptr<const Torus>& torus() const { return torus_; }
  int k() const { return torus_->k(); }
  const Eigen::MatrixXcd& A() const { return A_; }
  const Eigen::VectorXcd& b() const { return b_; }
  const IntMatrix& B() const { return B_; }
  const Eigen::VectorXd& t() const { return t_; }
  /// Real 2k x 2k derivative [[Re A, -Im A], [Im A, Re A]].
  Eigen::MatrixXd real_derivative() const;

  TorusMap inverse() const;
  /// Lattice-coordinate image of x, reduced to [0,1)^{2k}.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  TorusSpec spec() const;

 private:
  void induce();
  std::shared_ptr<const Torus> torus_;
  Eigen::MatrixXcd A_;
  Eigen::VectorXcd b_;
  IntMatrix B_;
  Eigen::VectorXd t_;
};

/// Exact determinant of an integer matrix.
long long integer_determinant(const IntMatrix& m);
/// Exact inverse of a unimodular integer matrix.
IntMatrix unimodular_inverse(const IntMatrix& m);

}  // namespace kahlerdyn
