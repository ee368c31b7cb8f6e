#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "selfdual/error.hpp"

namespace selfdual {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using Rational = boost::multiprecision::cpp_rational;

// Coefficients of a lattice vector in the lattice basis.
struct LatticeVector {
  IntVector coords;

  LatticeVector() = default;
  explicit LatticeVector(IntVector c) : coords(std::move(c)) {}
  LatticeVector(std::initializer_list<std::int64_t> c);

  int size() const { return static_cast<int>(coords.size()); }
  bool operator==(const LatticeVector& other) const { return coords == other.coords; }
};

struct Signature {
  int plus = 0;
  int minus = 0;

  bool operator==(const Signature&) const = default;
};

// Dense row-major matrix over Q. Only what the dual-lattice code needs.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols);

  static RationalMatrix from_integer(const IntMatrix& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  bool is_integral() const;
  IntMatrix to_integer() const;  // throws InvalidArgument unless is_integral()
  Eigen::MatrixXd to_double() const;

  bool operator==(const RationalMatrix& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

// Inverse by exact Gauss-Jordan elimination. Throws Degenerate if singular.
RationalMatrix inverse(const RationalMatrix& m);

// A lattice Z^rank with integer symmetric non-degenerate form (x,y) = x^T G y.
// Instances are only produced by analyze(), so the flags are always consistent
// with the Gram matrix.
class IntegralLattice {
 public:
  int rank() const { return static_cast<int>(gram_.rows()); }
  const IntMatrix& gram() const { return gram_; }
  Signature signature() const { return signature_; }
  bool is_even() const { return even_; }
  bool is_unimodular() const { return determinant_ == 1 || determinant_ == -1; }
  bool is_definite() const { return signature_.plus == 0 || signature_.minus == 0; }
  std::int64_t determinant() const { return determinant_; }

  // The indefinite form (x,y).
  std::int64_t pairing(const LatticeVector& x, const LatticeVector& y) const;
  std::int64_t norm(const LatticeVector& x) const { return pairing(x, x); }

  bool operator==(const IntegralLattice& other) const { return gram_ == other.gram_; }

 private:
  friend IntegralLattice analyze(const IntMatrix& gram);

  IntMatrix gram_;
  Signature signature_;
  bool even_ = true;
  std::int64_t determinant_ = 1;
};

// Validates the Gram matrix and computes the signature by exact LDL^T over Q
// (Sylvester inertia), plus evenness and the determinant. A 0x0 matrix is the
// zero lattice (needed for b2 = 0 manifolds such as S^4).
// Errors: DimensionMismatch (non-square), NonSymmetric, Degenerate.
IntegralLattice analyze(const IntMatrix& gram);

// Exact determinant of a square integer matrix.
Rational exact_determinant(const IntMatrix& m);

// Gram matrix of the dual lattice in the dual basis, i.e. gram^{-1}.
RationalMatrix dual_gram(const IntegralLattice& lat);

IntegralLattice direct_sum(const IntegralLattice& a, const IntegralLattice& b);
IntegralLattice negated(const IntegralLattice& lat);

// Standard Gram matrices.
IntMatrix identity_gram(int n);
IntMatrix hyperbolic_gram();
IntMatrix e8_gram();

// Called once per enumerated vector with its coordinates and its norm
// x^T G x (recomputed directly from G, not from the Cholesky recursion).
using NormVisitor = std::function<void(std::span<const std::int64_t> coords, double norm)>;

// Emits every x in Z^n with x^T G x <= bound exactly once, in ascending
// lexicographic order of coordinates. G must be symmetric positive definite.
// Returns the number of vectors emitted.
// Errors: NotPositiveDefinite, InvalidArgument (negative or non-finite bound),
// BoundTooLarge (search box exceeds the 32-bit coordinate range).
std::size_t enumerate_by_norm(const Eigen::MatrixXd& posdef_gram, double bound,
                              const NormVisitor& visit);

// Same, for the shifted set {x : (x+s)^T G (x+s) <= bound}; the visitor
// receives the integer x and the shifted norm.
std::size_t enumerate_shifted_by_norm(const Eigen::MatrixXd& posdef_gram,
                                      std::span<const double> shift, double bound,
                                      const NormVisitor& visit);

std::vector<LatticeVector> collect_by_norm(const Eigen::MatrixXd& posdef_gram, double bound);

// Diagonal of the U D U^T factorization used by the enumerator (squared
// Gram-Schmidt lengths in reverse basis order). Throws NotPositiveDefinite.
Eigen::VectorXd gram_schmidt_norms(const Eigen::MatrixXd& posdef_gram);

}  // namespace selfdual
