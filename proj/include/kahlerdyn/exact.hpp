// Exact rational arithmetic used by the spectral core: characteristic
// polynomials of rational matrices (division-free Berkowitz on the scaled
// integer matrix), polynomial gcd and Yun square-free factorization.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kahlerdyn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Row-major exact matrix.
using ExactMatrix = std::vector<std::vector<Rational>>;

/// Parses "p/q", "p" or a decimal integer string. Throws std::invalid_argument.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

/// Dense univariate polynomial, coefficients stored from degree 0 upward.
/// The zero polynomial has an empty coefficient list.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  const Rational& leading() const { return coeffs_.back(); }
  Rational operator[](int i) const;

  RationalPolynomial derivative() const;
  RationalPolynomial monic() const;
  Rational evaluate(const Rational& x) const;
  std::complex<long double> evaluate(std::complex<long double> x) const;

  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b);
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

  /// Euclidean division; throws std::domain_error on division by zero.
  static void divmod(const RationalPolynomial& a, const RationalPolynomial& b,
                     RationalPolynomial& quotient, RationalPolynomial& remainder);
  /// Monic gcd (zero if both are zero).
  static RationalPolynomial gcd(RationalPolynomial a, RationalPolynomial b);

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// det(xI - L) computed exactly. Entries are scaled to integers by the lcm
/// of their denominators and the Berkowitz recurrence runs in BigInt.
RationalPolynomial characteristic_polynomial(const ExactMatrix& matrix);

/// Exact determinant via the characteristic polynomial's constant term.
Rational exact_determinant(const ExactMatrix& matrix);

/// One factor of a square-free decomposition: `factor` is square-free and
/// every root of `factor` has algebraic multiplicity `multiplicity`.
struct SquareFreeFactor {
  RationalPolynomial factor;
  int multiplicity = 1;
};

/// Yun's algorithm. The product of factor^multiplicity equals monic(p).
std::vector<SquareFreeFactor> square_free_decomposition(const RationalPolynomial& p);

/// Complex roots of a square-free polynomial: companion-matrix eigenvalues
/// polished by Newton steps in long double.
std::vector<std::complex<double>> square_free_roots(const RationalPolynomial& p);

}  // namespace kahlerdyn
