#include "kahlerdyn/covector.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include "kahlerdyn/error.hpp"

namespace kahlerdyn {

namespace {

std::complex<double> i_power(int e) {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((e % 4) + 4) % 4];
}

std::vector<int> members(unsigned mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

}  // namespace

long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long c = 1;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

int popcount(unsigned mask) { return __builtin_popcount(mask); }

const std::vector<unsigned>& combinations(int k, int r) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<unsigned>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(k, r);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> lists;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == r) {
      lists.push_back(cur);
      return;
    }
    for (int i = start; i < k; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::vector<unsigned> masks;
  for (const auto& l : lists) {
    unsigned m = 0;
    for (int i : l) m |= 1u << i;
    masks.push_back(m);
  }
  return cache.emplace(key, std::move(masks)).first->second;
}

int combination_index(int k, unsigned mask) {
  const auto& c = combinations(k, popcount(mask));
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] == mask) return static_cast<int>(i);
  throw Error("index set out of range");
}

int covector_dim(int k, Bidegree b) { return static_cast<int>(binomial(k, b.p) * binomial(k, b.q)); }

int merge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int i : members(a))
    for (int j : members(b))
      if (i > j) ++inversions;
  return (inversions % 2) ? -1 : 1;
}

const WedgeTable& wedge_table(int k, Bidegree b1, Bidegree b2) {
  if (b1.p + b2.p > k || b1.q + b2.q > k) throw Error("bidegree overflow in wedge");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int, int>, WedgeTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(k, b1.p, b1.q, b2.p, b2.q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  WedgeTable t;
  t.k = k;
  t.b1 = b1;
  t.b2 = b2;
  t.out = {b1.p + b2.p, b1.q + b2.q};
  t.n1 = covector_dim(k, b1);
  t.n2 = covector_dim(k, b2);
  const auto& P1 = combinations(k, b1.p);
  const auto& Q1 = combinations(k, b1.q);
  const auto& P2 = combinations(k, b2.p);
  const auto& Q2 = combinations(k, b2.q);
  const int nq1 = static_cast<int>(Q1.size()), nq2 = static_cast<int>(Q2.size());
  const int nqo = static_cast<int>(binomial(k, t.out.q));
  t.entries.resize(static_cast<std::size_t>(t.n1) * t.n2);
  for (int i1 = 0; i1 < t.n1; ++i1) {
    unsigned I = P1[i1 / nq1], J = Q1[i1 % nq1];
    for (int i2 = 0; i2 < t.n2; ++i2) {
      unsigned K = P2[i2 / nq2], L = Q2[i2 % nq2];
      int s1 = merge_sign(I, K), s2 = merge_sign(J, L);
      WedgeEntry e;
      if (s1 != 0 && s2 != 0) {
        // dz_I dzbar_J dz_K dzbar_L = (-1)^{|J||K|} dz_I dz_K dzbar_J dzbar_L
        int s = ((popcount(J) * popcount(K)) % 2) ? -1 : 1;
        e.sign = s * s1 * s2;
        e.out = combination_index(k, I | K) * nqo + combination_index(k, J | L);
      }
      t.entries[static_cast<std::size_t>(i1) * t.n2 + i2] = e;
    }
  }
  return cache.emplace(key, std::move(t)).first->second;
}

Eigen::VectorXcd wedge_covectors(int k, Bidegree b1, const Eigen::VectorXcd& x, Bidegree b2,
                                 const Eigen::VectorXcd& y) {
  const WedgeTable& t = wedge_table(k, b1, b2);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(covector_dim(k, t.out));
  for (int i1 = 0; i1 < t.n1; ++i1) {
    if (x(i1) == 0.0) continue;
    for (int i2 = 0; i2 < t.n2; ++i2) {
      const auto& e = t.at(i1, i2);
      if (e.out >= 0) out(e.out) += static_cast<double>(e.sign) * x(i1) * y(i2);
    }
  }
  return out;
}

Eigen::MatrixXcd compound(const Eigen::MatrixXcd& A, int r) {
  const int k = static_cast<int>(A.rows());
  const auto& c = combinations(k, r);
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXcd out(n, n);
  if (r == 0) {
    out(0, 0) = 1.0;
    return out;
  }
  for (int a = 0; a < n; ++a) {
    auto rows = members(c[a]);
    for (int b = 0; b < n; ++b) {
      auto cols = members(c[b]);
      Eigen::MatrixXcd sub(r, r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) sub(i, j) = A(rows[i], cols[j]);
      out(a, b) = sub.determinant();
    }
  }
  return out;
}

Eigen::MatrixXcd covector_pullback_matrix(const Eigen::MatrixXcd& A, Bidegree b) {
  const int k = static_cast<int>(A.rows());
  Eigen::MatrixXcd cp = compound(A, b.p).transpose();
  Eigen::MatrixXcd cq = compound(A, b.q).conjugate().transpose();
  const Eigen::Index np = cp.rows(), nq = cq.rows();
  Eigen::MatrixXcd out(np * nq, np * nq);
  for (Eigen::Index i = 0; i < np; ++i)
    for (Eigen::Index j = 0; j < np; ++j) out.block(i * nq, j * nq, nq, nq) = cp(i, j) * cq;
  (void)k;
  return out;
}

Eigen::MatrixXcd real_basis_matrix(int k, int p) {
  const int n = static_cast<int>(binomial(k, p));
  const std::complex<double> ip = i_power(p * p);
  const std::complex<double> I(0, 1);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int col = a * n + b;
      if (a == b) {
        T(a * n + a, col) = ip;
      } else if (a < b) {
        T(a * n + b, col) = ip;
        T(b * n + a, col) = ip;
      } else {
        // position (J, I) with I = b < J = a: g = i (f_IJ - f_JI)
        T(b * n + a, col) = I * ip;
        T(a * n + b, col) = -I * ip;
      }
    }
  return T;
}

Eigen::VectorXd real_coordinates(int k, int p, const Eigen::VectorXcd& raw) {
  const int n = static_cast<int>(binomial(k, p));
  const std::complex<double> ip = i_power(p * p);
  Eigen::VectorXd out(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a <= b) {
        out(a * n + b) = (raw(a * n + b) / ip).real();
      } else {
        out(a * n + b) = (raw(b * n + a) / ip).imag();
      }
    }
  return out;
}

Eigen::VectorXcd omega_power_covector(int k, int q) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
  Eigen::VectorXcd om = Eigen::VectorXcd::Zero(k * k);
  for (int l = 0; l < k; ++l) om(l * k + l) = std::complex<double>(0.0, 0.5);
  for (int j = 0; j < q; ++j) acc = wedge_covectors(k, {j, j}, acc, {1, 1}, om);
  return acc;
}

int conjugate_index(int k, Bidegree b, int idx) {
  const int nq = static_cast<int>(binomial(k, b.q));
  const int np = static_cast<int>(binomial(k, b.p));
  const int iI = idx / nq, iJ = idx % nq;
  // conj maps (p,q) to (q,p): J becomes the holomorphic index.
  return iJ * np + iI;
}

}  // namespace kahlerdyn
