#include "kahlerdyn/torus.hpp"

#include <cmath>

#include "kahlerdyn/error.hpp"
#include "kahlerdyn/exact.hpp"

namespace kahlerdyn {

namespace {

Eigen::MatrixXd realify(const Eigen::MatrixXcd& A) {
  const Eigen::Index k = A.rows();
  Eigen::MatrixXd R(2 * k, 2 * k);
  R << A.real(), -A.imag(), A.imag(), A.real();
  return R;
}

ExactMatrix to_exact(const IntMatrix& m) {
  ExactMatrix e(m.rows(), std::vector<Rational>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) e[i][j] = Rational(m(i, j));
  return e;
}

}  // namespace

TorusSpec TorusSpec::standard(int k, const Eigen::MatrixXcd& A, const Eigen::VectorXcd& translation) {
  TorusSpec s;
  s.k = k;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(k);
    v(j) = 1.0;
    s.lattice_basis.push_back(v);
  }
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(k);
    v(j) = std::complex<double>(0.0, 1.0);
    s.lattice_basis.push_back(v);
  }
  s.A = A;
  s.translation = translation.size() == k ? translation : Eigen::VectorXcd(Eigen::VectorXcd::Zero(k));
  return s;
}

Torus::Torus(int k, std::vector<Eigen::VectorXcd> lattice_basis) : k_(k), basis_(std::move(lattice_basis)) {
  if (k < 1) throw Error("torus dimension must be >= 1");
  if (static_cast<int>(basis_.size()) != 2 * k) throw Error("lattice basis needs 2k vectors");
  Lr_.resize(2 * k, 2 * k);
  for (int j = 0; j < 2 * k; ++j) {
    if (basis_[j].size() != k) throw Error("lattice vector has wrong dimension");
    Lr_.col(j) << basis_[j].real(), basis_[j].imag();
  }
  volume_ = std::abs(Lr_.determinant());
  if (volume_ < 1e-12) throw Error("lattice basis is not real-independent");
  Lr_inv_ = Lr_.inverse();
  Eigen::MatrixXcd half(2 * k, k);
  half.setZero();
  for (int l = 0; l < k; ++l) {
    half(l, l) = 0.5;
    half(k + l, l) = std::complex<double>(0.0, -0.5);
  }
  dxdz_ = Lr_inv_.cast<std::complex<double>>() * half;
  // i^{-k^2} 2^k vol
  const int r = ((-(k * k)) % 4 + 4) % 4;
  const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  top_integral_ = ipow[r] * std::pow(2.0, k) * volume_;
}

Eigen::VectorXcd Torus::symbol(const std::vector<long long>& mode) const {
  Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(k_);
  for (int j = 0; j < 2 * k_; ++j) {
    if (mode[j] != 0) xi += static_cast<double>(mode[j]) * dxdz_.row(j).transpose();
  }
  return xi;
}

bool Torus::same_as(const Torus& other) const {
  if (k_ != other.k_) return false;
  return (Lr_ - other.Lr_).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, Lr_.cwiseAbs().maxCoeff());
}

Eigen::VectorXcd Torus::to_complex(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Lr_ * x;
  Eigen::VectorXcd z(k_);
  for (int l = 0; l < k_; ++l) z(l) = {y(l), y(k_ + l)};
  return z;
}

long long integer_determinant(const IntMatrix& m) {
  Rational d = exact_determinant(to_exact(m));
  return boost::multiprecision::numerator(d).convert_to<long long>();
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
  const Eigen::Index n = m.rows();
  // Gauss-Jordan over the rationals.
  ExactMatrix a = to_exact(m);
  ExactMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (Eigen::Index i = 0; i < n; ++i) inv[i][i] = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw Error("matrix is singular");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    Rational s = a[c][c];
    for (Eigen::Index j = 0; j < n; ++j) {
      a[c][j] /= s;
      inv[c][j] /= s;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (Eigen::Index j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  IntMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (boost::multiprecision::denominator(inv[i][j]) != 1) throw Error("inverse is not integral");
      out(i, j) = boost::multiprecision::numerator(inv[i][j]).convert_to<long long>();
    }
  return out;
}

TorusMap::TorusMap(const TorusSpec& spec)
    : torus_(std::make_shared<Torus>(spec.k, spec.lattice_basis)), A_(spec.A), b_(spec.translation) {
  induce();
}

TorusMap::TorusMap(std::shared_ptr<const Torus> torus, const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b)
    : torus_(std::move(torus)), A_(A), b_(b) {
  induce();
}

void TorusMap::induce() {
  const int k = torus_->k();
  if (A_.rows() != k || A_.cols() != k) throw Error("map matrix must be k x k");
  if (b_.size() == 0) b_ = Eigen::VectorXcd::Zero(k);
  if (b_.size() != k) throw Error("translation must have k entries");
  Eigen::MatrixXd Bf = torus_->Lr_inv() * realify(A_) * torus_->Lr();
  B_.resize(2 * k, 2 * k);
  const double scale = std::max(1.0, Bf.cwiseAbs().maxCoeff());
  for (int i = 0; i < 2 * k; ++i)
    for (int j = 0; j < 2 * k; ++j) {
      double r = std::round(Bf(i, j));
      if (std::abs(Bf(i, j) - r) > 1e-9 * scale) throw Error("not an automorphism of the torus");
      B_(i, j) = static_cast<long long>(r);
    }
  long long det = integer_determinant(B_);
  if (det != 1 && det != -1) throw Error("not an automorphism of the torus");
  Eigen::VectorXd bb(2 * k);
  bb << b_.real(), b_.imag();
  t_ = torus_->Lr_inv() * bb;
}

Eigen::MatrixXd TorusMap::real_derivative() const { return realify(A_); }

TorusMap TorusMap::inverse() const {
  Eigen::MatrixXcd Ai = A_.inverse();
  Eigen::VectorXcd bi = -(Ai * b_);
  TorusMap inv(torus_, Ai, bi);
  // Snap to the exact integer inverse so f o f^{-1} is the identity on modes.
  inv.B_ = unimodular_inverse(B_);
  return inv;
}

Eigen::VectorXd TorusMap::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = B_.cast<double>() * x + t_;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) -= std::floor(y(i));
  return y;
}

TorusSpec TorusMap::spec() const {
  TorusSpec s;
  s.k = k();
  s.lattice_basis = torus_->lattice_basis();
  s.A = A_;
  s.translation = b_;
  return s;
}

}  // namespace kahlerdyn
