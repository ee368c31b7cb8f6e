#include "selfdual/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace selfdual {

namespace {

constexpr double kMaxBoxHalfWidth = 2147483647.0;

void require_square_symmetric(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) {
    throw Error(Errc::DimensionMismatch, "Gram matrix must be square");
  }
  if (g.size() == 0) return;
  const double scale = 1.0 + g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::NotPositiveDefinite, "Gram matrix is not symmetric");
  }
}

// G = U D U^T with U unit upper triangular. Then
//   x^T G x = sum_i d_i (x_i + sum_{j<i} U(j,i) x_j)^2,
// so coordinate i only depends on the earlier ones, which gives the
// lexicographic emission order.
struct UduFactor {
  Eigen::MatrixXd u;
  Eigen::VectorXd d;
};

UduFactor udu_factor(const Eigen::MatrixXd& g) {
  require_square_symmetric(g);
  const int n = static_cast<int>(g.rows());
  UduFactor f{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
  for (int i = n - 1; i >= 0; --i) {
    double di = g(i, i);
    for (int k = i + 1; k < n; ++k) di -= f.u(i, k) * f.u(i, k) * f.d(k);
    if (!(di > 0.0) || !std::isfinite(di)) {
      throw Error(Errc::NotPositiveDefinite,
                  "factorization failed at index " + std::to_string(i));
    }
    f.d(i) = di;
    for (int j = 0; j < i; ++j) {
      double v = g(j, i);
      for (int k = i + 1; k < n; ++k) v -= f.u(j, k) * f.u(i, k) * f.d(k);
      f.u(j, i) = v / di;
    }
  }
  return f;
}

std::size_t enumerate_impl(const Eigen::MatrixXd& g, const double* shift, double bound,
                           const NormVisitor& visit) {
  if (!std::isfinite(bound) || bound < 0.0) {
    throw Error(Errc::InvalidArgument, "bound must be finite and non-negative");
  }
  const UduFactor f = udu_factor(g);
  const int n = static_cast<int>(g.rows());
  if (n == 0) {
    visit({}, 0.0);
    return 1;
  }

  // Box check: |x_i + s_i| <= sqrt(bound * (G^-1)_ii).
  const Eigen::MatrixXd ginv = g.inverse();
  for (int i = 0; i < n; ++i) {
    const double half = std::sqrt(bound * std::max(ginv(i, i), 0.0));
    const double s = shift ? std::abs(shift[i]) : 0.0;
    if (!(half + s < kMaxBoxHalfWidth)) {
      throw Error(Errc::BoundTooLarge, "search box exceeds the 32-bit coordinate range");
    }
  }

  // Slack so rounding in the recursion never drops a boundary vector; the
  // exact filter below removes anything that slipped in.
  const double loose = bound * (1.0 + 1e-9) + 1e-12;

  std::vector<std::int64_t> x(static_cast<std::size_t>(n));
  std::vector<std::int64_t> hi(static_cast<std::size_t>(n));
  std::vector<double> partial(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> center(static_cast<std::size_t>(n), 0.0);
  Eigen::VectorXd y(n);

  auto sh = [&](int i) { return shift ? shift[i] : 0.0; };

  // Sets up the range of coordinate i; returns false if empty.
  auto open_level = [&](int i) -> bool {
    double c = 0.0;
    for (int j = 0; j < i; ++j) c -= f.u(j, i) * (static_cast<double>(x[j]) + sh(j));
    center[i] = c;
    const double room = (loose - partial[i]) / f.d(i);
    if (room < 0.0) return false;
    const double r = std::sqrt(room) * (1.0 + 1e-12) + 1e-12;
    const double lo = std::ceil(c - r - sh(i));
    const double up = std::floor(c + r - sh(i));
    if (lo > up) return false;
    x[i] = static_cast<std::int64_t>(lo);
    hi[i] = static_cast<std::int64_t>(up);
    return true;
  };

  std::size_t emitted = 0;
  int level = 0;
  bool have = open_level(0);
  if (!have) return 0;
  while (level >= 0) {
    if (x[level] > hi[level]) {
      --level;
      if (level >= 0) ++x[level];
      continue;
    }
    const double t = static_cast<double>(x[level]) + sh(level) - center[level];
    partial[level + 1] = partial[level] + f.d(level) * t * t;
    if (level + 1 < n) {
      if (partial[level + 1] <= loose && open_level(level + 1)) {
        ++level;
      } else {
        ++x[level];
      }
      continue;
    }
    for (int i = 0; i < n; ++i) y(i) = static_cast<double>(x[i]) + sh(i);
    const double exact = y.dot(g * y);
    if (exact <= bound) {
      visit(std::span<const std::int64_t>(x.data(), x.size()), exact);
      ++emitted;
    }
    ++x[level];
  }
  return emitted;
}

}  // namespace

LatticeVector::LatticeVector(std::initializer_list<std::int64_t> c)
    : coords(static_cast<Eigen::Index>(c.size())) {
  Eigen::Index i = 0;
  for (auto v : c) coords(i++) = v;
}

RationalMatrix::RationalMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

RationalMatrix RationalMatrix::from_integer(const IntMatrix& m) {
  RationalMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

bool RationalMatrix::is_integral() const {
  for (const auto& v : data_)
    if (boost::multiprecision::denominator(v) != 1) return false;
  return true;
}

IntMatrix RationalMatrix::to_integer() const {
  if (!is_integral()) throw Error(Errc::InvalidArgument, "matrix has non-integer entries");
  IntMatrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      m(i, j) = boost::multiprecision::numerator((*this)(i, j)).convert_to<std::int64_t>();
  return m;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).convert_to<double>();
  return m;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "inverse of non-square matrix");
  const int n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv(n, n);
  for (int i = 0; i < n; ++i) inv(i, i) = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a(piv, col) == 0) ++piv;
    if (piv == n) throw Error(Errc::Degenerate, "matrix is singular");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const Rational p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const Rational factor = a(i, col);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= factor * a(col, j);
        inv(i, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

std::int64_t IntegralLattice::pairing(const LatticeVector& x, const LatticeVector& y) const {
  if (x.size() != rank() || y.size() != rank()) {
    throw Error(Errc::DimensionMismatch, "vector length does not match lattice rank");
  }
  return x.coords.dot(gram_ * y.coords);
}

namespace {

// Symmetric elimination over Q. Zero pivots are repaired by a congruence
// (swap with a later non-zero diagonal, or e_k += e_j when only an
// off-diagonal entry survives), so the pivots' signs give the inertia and
// their product the determinant.
struct Inertia {
  Signature signature;
  Rational determinant;
};

Inertia exact_inertia(const IntMatrix& gram) {
  const int n = static_cast<int>(gram.rows());
  RationalMatrix a = RationalMatrix::from_integer(gram);
  Inertia out{{}, Rational(1)};
  for (int k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      int swap_with = -1;
      for (int j = k + 1; j < n && swap_with < 0; ++j)
        if (a(j, j) != 0) swap_with = j;
      if (swap_with >= 0) {
        for (int j = 0; j < n; ++j) std::swap(a(k, j), a(swap_with, j));
        for (int i = 0; i < n; ++i) std::swap(a(i, k), a(i, swap_with));
      } else {
        int partner = -1;
        for (int j = k + 1; j < n && partner < 0; ++j)
          if (a(k, j) != 0) partner = j;
        if (partner < 0) {
          out.determinant = 0;
          return out;
        }
        for (int j = 0; j < n; ++j) a(k, j) += a(partner, j);
        for (int i = 0; i < n; ++i) a(i, k) += a(i, partner);
      }
    }
    const Rational p = a(k, k);
    out.determinant *= p;
    if (p > 0) {
      ++out.signature.plus;
    } else {
      ++out.signature.minus;
    }
    for (int i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      const Rational factor = a(i, k) / p;
      for (int j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
      a(i, k) = 0;
    }
    for (int j = k + 1; j < n; ++j) a(k, j) = 0;
  }
  return out;
}

}  // namespace

Rational exact_determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "determinant of non-square matrix");
  const int n = static_cast<int>(m.rows());
  RationalMatrix a = RationalMatrix::from_integer(m);
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a(piv, col) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (int i = col + 1; i < n; ++i) {
      if (a(i, col) == 0) continue;
      const Rational factor = a(i, col) / a(col, col);
      for (int j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
    }
  }
  return det;
}

IntegralLattice analyze(const IntMatrix& gram) {
  if (gram.rows() != gram.cols()) {
    throw Error(Errc::DimensionMismatch, "Gram matrix must be square");
  }
  if (gram != gram.transpose()) throw Error(Errc::NonSymmetric, "Gram matrix is not symmetric");
  const Inertia inertia = exact_inertia(gram);
  if (inertia.determinant == 0) throw Error(Errc::Degenerate, "Gram matrix has zero determinant");

  IntegralLattice lat;
  lat.gram_ = gram;
  lat.signature_ = inertia.signature;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    if (gram(i, i) % 2 != 0) lat.even_ = false;
  }
  const auto num = boost::multiprecision::numerator(inertia.determinant);
  if (boost::multiprecision::abs(num) > std::numeric_limits<std::int64_t>::max()) {
    throw Error(Errc::InvalidArgument, "determinant exceeds the 64-bit range");
  }
  lat.determinant_ = num.convert_to<std::int64_t>();
  return lat;
}

RationalMatrix dual_gram(const IntegralLattice& lat) {
  return inverse(RationalMatrix::from_integer(lat.gram()));
}

IntegralLattice direct_sum(const IntegralLattice& a, const IntegralLattice& b) {
  const int n = a.rank() + b.rank();
  IntMatrix g = IntMatrix::Zero(n, n);
  g.topLeftCorner(a.rank(), a.rank()) = a.gram();
  g.bottomRightCorner(b.rank(), b.rank()) = b.gram();
  return analyze(g);
}

IntegralLattice negated(const IntegralLattice& lat) { return analyze(-lat.gram()); }

IntMatrix identity_gram(int n) { return IntMatrix::Identity(n, n); }

IntMatrix hyperbolic_gram() {
  IntMatrix h(2, 2);
  h << 0, 1, 1, 0;
  return h;
}

IntMatrix e8_gram() {
  // Cartan matrix in Bourbaki labelling.
  IntMatrix c = 2 * IntMatrix::Identity(8, 8);
  const int edges[][2] = {{0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
  for (const auto& e : edges) {
    c(e[0], e[1]) = -1;
    c(e[1], e[0]) = -1;
  }
  return c;
}

std::size_t enumerate_by_norm(const Eigen::MatrixXd& posdef_gram, double bound,
                              const NormVisitor& visit) {
  return enumerate_impl(posdef_gram, nullptr, bound, visit);
}

std::size_t enumerate_shifted_by_norm(const Eigen::MatrixXd& posdef_gram,
                                      std::span<const double> shift, double bound,
                                      const NormVisitor& visit) {
  if (static_cast<Eigen::Index>(shift.size()) != posdef_gram.rows()) {
    throw Error(Errc::DimensionMismatch, "shift length does not match Gram matrix");
  }
  return enumerate_impl(posdef_gram, shift.data(), bound, visit);
}

std::vector<LatticeVector> collect_by_norm(const Eigen::MatrixXd& posdef_gram, double bound) {
  std::vector<LatticeVector> out;
  enumerate_by_norm(posdef_gram, bound, [&](std::span<const std::int64_t> c, double) {
    IntVector v(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
    out.emplace_back(std::move(v));
  });
  return out;
}

Eigen::VectorXd gram_schmidt_norms(const Eigen::MatrixXd& posdef_gram) {
  return udu_factor(posdef_gram).d;
}

}  // namespace selfdual
