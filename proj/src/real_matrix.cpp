#include "kahlerdyn/real_matrix.hpp"

#include <cmath>

#include "kahlerdyn/error.hpp"

namespace kahlerdyn {

RealMatrix::RealMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

RealMatrix::RealMatrix(ExactMatrix entries) {
  const auto r = static_cast<Eigen::Index>(entries.size());
  const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(entries[0].size());
  values_.resize(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(entries[i].size()) != c) throw Error("ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) values_(i, j) = entries[i][j].convert_to<double>();
  }
  exact_ = std::move(entries);
}

RealMatrix RealMatrix::identity(int n) {
  ExactMatrix e(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) e[i][i] = 1;
  return RealMatrix(std::move(e));
}

const ExactMatrix& RealMatrix::exact() const {
  if (!exact_) throw Error("matrix is not in exact mode");
  return *exact_;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matrix product dimension mismatch");
  if (!a.is_exact() || !b.is_exact()) return RealMatrix(Eigen::MatrixXd(a.values() * b.values()));
  const auto& x = a.exact();
  const auto& y = b.exact();
  ExactMatrix out(a.rows(), std::vector<Rational>(b.cols(), Rational(0)));
  for (int i = 0; i < a.rows(); ++i)
    for (int l = 0; l < a.cols(); ++l) {
      if (x[i][l] == 0) continue;
      for (int j = 0; j < b.cols(); ++j) out[i][j] += x[i][l] * y[l][j];
    }
  return RealMatrix(std::move(out));
}

std::optional<RealMatrix> integral_snap(const Eigen::MatrixXd& m, double tol) {
  ExactMatrix e(m.rows(), std::vector<Rational>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double r = std::round(m(i, j));
      if (std::abs(m(i, j) - r) > tol) return std::nullopt;
      e[i][j] = Rational(static_cast<long long>(r));
    }
  return RealMatrix(std::move(e));
}

}  // namespace kahlerdyn
