#include "kahlerdyn/exact.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace kahlerdyn {

namespace {

BigInt lcm_big(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  BigInt g = boost::multiprecision::gcd(a, b);
  return boost::multiprecision::abs(a / g * b);
}

long double to_ld(const Rational& r) { return r.convert_to<long double>(); }

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  auto parse_int = [&](const std::string& part) {
    if (part.empty()) throw std::invalid_argument("malformed rational literal '" + text + "'");
    std::size_t start = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (start == part.size()) throw std::invalid_argument("malformed rational literal '" + text + "'");
    for (std::size_t i = start; i < part.size(); ++i) {
      if (part[i] < '0' || part[i] > '9')
        throw std::invalid_argument("malformed rational literal '" + text + "'");
    }
    return BigInt(part[0] == '+' ? part.substr(1) : part);
  };
  if (slash == std::string::npos) return Rational(parse_int(s));
  BigInt num = parse_int(s.substr(0, slash));
  BigInt den = parse_int(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

std::string format_rational(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

RationalPolynomial::RationalPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPolynomial::operator[](int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[static_cast<std::size_t>(i)];
}

RationalPolynomial RationalPolynomial::derivative() const {
  std::vector<Rational> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<int>(i));
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::monic() const {
  if (is_zero()) return *this;
  std::vector<Rational> out = coeffs_;
  Rational lead = leading();
  for (auto& c : out) c /= lead;
  return RationalPolynomial(std::move(out));
}

Rational RationalPolynomial::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<long double> RationalPolynomial::evaluate(std::complex<long double> x) const {
  std::complex<long double> acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_ld(*it);
  return acc;
}

RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
  return RationalPolynomial(std::move(out));
}

RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[static_cast<int>(i)] - b[static_cast<int>(i)];
  return RationalPolynomial(std::move(out));
}

RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RationalPolynomial(std::move(out));
}

void RationalPolynomial::divmod(const RationalPolynomial& a, const RationalPolynomial& b,
                                RationalPolynomial& quotient, RationalPolynomial& remainder) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.coeffs_;
  int db = b.degree();
  std::vector<Rational> quo(std::max(0, a.degree() - db + 1));
  for (int i = a.degree(); i >= db; --i) {
    Rational c = rem[static_cast<std::size_t>(i)] / b.leading();
    if (c == 0) continue;
    quo[static_cast<std::size_t>(i - db)] = c;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i - db + j)] -= c * b.coeffs_[static_cast<std::size_t>(j)];
  }
  quotient = RationalPolynomial(std::move(quo));
  remainder = RationalPolynomial(std::move(rem));
}

RationalPolynomial RationalPolynomial::gcd(RationalPolynomial a, RationalPolynomial b) {
  while (!b.is_zero()) {
    RationalPolynomial q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

RationalPolynomial characteristic_polynomial(const ExactMatrix& matrix) {
  const std::size_t n = matrix.size();
  for (const auto& row : matrix) {
    if (row.size() != n) throw std::invalid_argument("characteristic polynomial needs a square matrix");
  }
  if (n == 0) return RationalPolynomial({Rational(1)});

  BigInt scale = 1;
  for (const auto& row : matrix)
    for (const auto& e : row) scale = lcm_big(scale, boost::multiprecision::denominator(e));

  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = matrix[i][j] * scale;
      a[i][j] = boost::multiprecision::numerator(v);
    }

  // Berkowitz: coefficient vector, highest degree first.
  std::vector<BigInt> vect = {BigInt(1), -a[0][0]};
  for (std::size_t r = 1; r < n; ++r) {
    // t = [1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C]
    std::vector<BigInt> t(r + 2);
    t[0] = 1;
    t[1] = -a[r][r];
    std::vector<BigInt> col(r);
    for (std::size_t i = 0; i < r; ++i) col[i] = a[i][r];
    for (std::size_t j = 0; j < r; ++j) {
      BigInt s = 0;
      for (std::size_t i = 0; i < r; ++i) s += a[r][i] * col[i];
      t[j + 2] = -s;
      std::vector<BigInt> next(r, BigInt(0));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t l = 0; l < r; ++l) next[i] += a[i][l] * col[l];
      col = std::move(next);
    }
    std::vector<BigInt> out(r + 2, BigInt(0));
    for (std::size_t i = 0; i < r + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, r); ++j) out[i] += t[i - j] * vect[j];
    vect = std::move(out);
  }

  // vect[i] is the coefficient of x^{n-i} of det(xI - sA); undo the scaling.
  std::vector<Rational> coeffs(n + 1);
  BigInt power = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    coeffs[n - i] = Rational(vect[i], power);
    power *= scale;
  }
  return RationalPolynomial(std::move(coeffs));
}

Rational exact_determinant(const ExactMatrix& matrix) {
  RationalPolynomial p = characteristic_polynomial(matrix);
  Rational c0 = p[0];
  return (matrix.size() % 2 == 0) ? c0 : Rational(-c0);
}

std::vector<SquareFreeFactor> square_free_decomposition(const RationalPolynomial& p) {
  std::vector<SquareFreeFactor> out;
  if (p.degree() < 1) return out;
  RationalPolynomial f = p.monic();
  RationalPolynomial fp = f.derivative();
  RationalPolynomial a = RationalPolynomial::gcd(f, fp);
  RationalPolynomial b, c, d, rem;
  RationalPolynomial::divmod(f, a, b, rem);
  RationalPolynomial::divmod(fp, a, c, rem);
  d = c - b.derivative();
  int i = 1;
  while (b.degree() >= 1) {
    RationalPolynomial g = RationalPolynomial::gcd(b, d);
    RationalPolynomial nb, nc;
    RationalPolynomial::divmod(b, g, nb, rem);
    RationalPolynomial::divmod(d, g, nc, rem);
    if (g.degree() >= 1) out.push_back({g, i});
    b = nb;
    c = nc;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

std::vector<std::complex<double>> square_free_roots(const RationalPolynomial& p) {
  std::vector<std::complex<double>> roots;
  const int deg = p.degree();
  if (deg < 1) return roots;
  RationalPolynomial m = p.monic();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -static_cast<double>(to_ld(m[i]));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  RationalPolynomial dm = m.derivative();
  for (int i = 0; i < deg; ++i) {
    std::complex<long double> z(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
    for (int iter = 0; iter < 8; ++iter) {
      std::complex<long double> fz = m.evaluate(z);
      std::complex<long double> dz = dm.evaluate(z);
      if (std::abs(dz) == 0.0L) break;
      std::complex<long double> step = fz / dz;
      z -= step;
      if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(z))) break;
    }
    roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  // Real polynomial: snap tiny imaginary parts of real roots and pair conjugates.
  for (auto& r : roots) {
    if (std::abs(r.imag()) <= 1e-14 * std::max(1.0, std::abs(r))) r = {r.real(), 0.0};
  }
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return roots;
}

}  // namespace kahlerdyn
