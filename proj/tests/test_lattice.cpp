#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "selfdual/lattice.hpp"

using namespace selfdual;

namespace {

IntMatrix mat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (auto v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Analyze, BasicLattices) {
  const auto z = analyze(identity_gram(1));
  EXPECT_EQ(z.signature(), (Signature{1, 0}));
  EXPECT_FALSE(z.is_even());
  EXPECT_TRUE(z.is_unimodular());

  const auto h = analyze(hyperbolic_gram());
  EXPECT_EQ(h.signature(), (Signature{1, 1}));
  EXPECT_TRUE(h.is_even());
  EXPECT_EQ(h.determinant(), -1);
  EXPECT_FALSE(h.is_definite());

  const auto e8 = analyze(e8_gram());
  EXPECT_EQ(e8.signature(), (Signature{8, 0}));
  EXPECT_TRUE(e8.is_even());
  EXPECT_EQ(e8.determinant(), 1);

  const auto a2 = analyze(mat({{2, -1}, {-1, 2}}));
  EXPECT_EQ(a2.determinant(), 3);
  EXPECT_FALSE(a2.is_unimodular());

  const auto odd = analyze(mat({{1, 0}, {0, -1}}));
  EXPECT_FALSE(odd.is_even());
  EXPECT_EQ(odd.signature(), (Signature{1, 1}));
}

TEST(Analyze, ZeroDiagonalPivots) {
  // Every leading minor vanishes here; the inertia must come out of pivoting.
  const auto a = analyze(mat({{0, 0, 1}, {0, 0, 1}, {1, 1, 1}}) + mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
  EXPECT_EQ(a.signature().plus + a.signature().minus, 3);
  const auto k3 = analyze(direct_sum(direct_sum(negated(analyze(e8_gram())), negated(analyze(e8_gram()))),
                                     direct_sum(direct_sum(analyze(hyperbolic_gram()), analyze(hyperbolic_gram())),
                                                analyze(hyperbolic_gram())))
                              .gram());
  EXPECT_EQ(k3.signature(), (Signature{3, 19}));
  EXPECT_EQ(k3.rank(), 22);
  EXPECT_TRUE(k3.is_even());
  EXPECT_EQ(k3.determinant(), -1);
}

TEST(Analyze, Errors) {
  EXPECT_EQ(error_of([] { analyze(IntMatrix(2, 3)); }), Errc::DimensionMismatch);
  EXPECT_EQ(error_of([] { analyze(mat({{1, 2}, {0, 1}})); }), Errc::NonSymmetric);
  EXPECT_EQ(error_of([] { analyze(mat({{1, 1}, {1, 1}})); }), Errc::Degenerate);
  try {
    analyze(mat({{2, 2}, {2, 2}}));
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.module()), "lattice_core");
    EXPECT_EQ(std::string(e.variant()), "Degenerate");
    EXPECT_EQ(std::string(e.what()).rfind("lattice_core::Degenerate: ", 0), 0u);
  }
}

TEST(Analyze, RankZero) {
  const auto zero = analyze(IntMatrix(0, 0));
  EXPECT_EQ(zero.rank(), 0);
  EXPECT_TRUE(zero.is_even());
  EXPECT_EQ(zero.determinant(), 1);
}

TEST(Analyze, SignatureMatchesEigenvalueCount) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-4, 4), size(1, 6);
  int checked = 0;
  while (checked < 200) {
    const int n = size(rng);
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = entry(rng);
    if (exact_determinant(g) == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.cast<double>());
    const int plus = static_cast<int>((es.eigenvalues().array() > 0).count());
    const auto lat = analyze(g);
    EXPECT_EQ(lat.signature(), (Signature{plus, n - plus}));
    EXPECT_EQ(Rational(lat.determinant()), exact_determinant(g));
    ++checked;
  }
}

TEST(Analyze, InvariantUnderUnimodularChange) {
  std::mt19937_64 rng(12);
  for (const IntMatrix& g : {e8_gram(), hyperbolic_gram(), mat({{1, 0}, {0, -1}}), mat({{2, -1}, {-1, 2}})}) {
    const auto base = analyze(g);
    for (int t = 0; t < 20; ++t) {
      const IntMatrix u = oracle::random_unimodular(rng, static_cast<int>(g.rows()), 8);
      const auto moved = analyze(u.transpose() * g * u);
      EXPECT_EQ(moved.signature(), base.signature());
      EXPECT_EQ(moved.is_even(), base.is_even());
      EXPECT_EQ(moved.determinant(), base.determinant());
    }
  }
}

TEST(Dual, A2) {
  const RationalMatrix d = dual_gram(analyze(mat({{2, -1}, {-1, 2}})));
  EXPECT_EQ(d(0, 0), Rational(2, 3));
  EXPECT_EQ(d(0, 1), Rational(1, 3));
  EXPECT_FALSE(d.is_integral());
  EXPECT_EQ(inverse(d), RationalMatrix::from_integer(mat({{2, -1}, {-1, 2}})));
}

TEST(Dual, UnimodularIsSelfDualUpToBasis) {
  const RationalMatrix d = dual_gram(analyze(e8_gram()));
  ASSERT_TRUE(d.is_integral());
  const auto dual = analyze(d.to_integer());
  EXPECT_TRUE(dual.is_even());
  EXPECT_EQ(dual.determinant(), 1);
}

TEST(Pairing, DimensionMismatch) {
  const auto z2 = analyze(identity_gram(2));
  EXPECT_EQ(z2.pairing({1, 2}, {3, 4}), 11);
  EXPECT_EQ(error_of([&] { z2.norm({1, 2, 3}); }), Errc::DimensionMismatch);
}

TEST(DirectSum, BlockDiagonal) {
  const auto s = direct_sum(analyze(identity_gram(1)), analyze(hyperbolic_gram()));
  EXPECT_EQ(s.gram(), mat({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(s.signature(), (Signature{2, 1}));
  EXPECT_EQ(negated(s).signature(), (Signature{1, 2}));
}

TEST(Enumerate, ShellCounts) {
  // r_2(n) for n = 0..5 is 1, 4, 4, 0, 4, 8.
  EXPECT_EQ(collect_by_norm(identity_gram(2).cast<double>(), 5.0).size(), 21u);
  EXPECT_EQ(collect_by_norm(e8_gram().cast<double>(), 4.0).size(), 1u + 240u + 2160u);
  EXPECT_EQ(collect_by_norm(identity_gram(3).cast<double>(), 0.5).size(), 1u);
}

TEST(Enumerate, MatchesBoxSearchAndIsOrdered) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ub(0.0, 20.0);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 4;
    const Eigen::MatrixXd g = oracle::random_posdef(rng, n);
    const double bound = ub(rng);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues()(0);
    const auto half = static_cast<std::int64_t>(std::ceil(std::sqrt(bound / lmin)));
    std::vector<std::vector<std::int64_t>> seen;
    enumerate_by_norm(g, bound, [&](std::span<const std::int64_t> c, double norm) {
      seen.emplace_back(c.begin(), c.end());
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = static_cast<double>(c[static_cast<std::size_t>(i)]);
      EXPECT_NEAR(norm, x.dot(g * x), 1e-9 * (1.0 + norm));
      EXPECT_LE(norm, bound);
    });
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    EXPECT_EQ(std::set<std::vector<std::int64_t>>(seen.begin(), seen.end()).size(), seen.size());
    std::size_t brute = 0;
    oracle::box(n, half, [&](const Eigen::VectorXd& x) {
      if (x.dot(g * x) <= bound) ++brute;
    });
    EXPECT_EQ(seen.size(), brute) << "trial " << t;
  }
}

TEST(Enumerate, Shifted) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> us(-0.5, 0.5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd g = oracle::random_posdef(rng, 2);
    const Eigen::Vector2d s(us(rng), us(rng));
    const double bound = 6.0;
    std::size_t got = enumerate_shifted_by_norm(g, std::span<const double>(s.data(), 2), bound,
                                                [](std::span<const std::int64_t>, double) {});
    std::size_t brute = 0;
    oracle::box(2, 30, [&](const Eigen::VectorXd& x) {
      const Eigen::VectorXd y = x + s;
      if (y.dot(g * y) <= bound) ++brute;
    });
    EXPECT_EQ(got, brute);
  }
}

TEST(Enumerate, Errors) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  const NormVisitor none = [](std::span<const std::int64_t>, double) {};
  EXPECT_EQ(error_of([&] { enumerate_by_norm(g, -1.0, none); }), Errc::InvalidArgument);
  EXPECT_EQ(error_of([&] { enumerate_by_norm(g, std::nan(""), none); }), Errc::InvalidArgument);
  EXPECT_EQ(error_of([&] { enumerate_by_norm(hyperbolic_gram().cast<double>(), 1.0, none); }),
            Errc::NotPositiveDefinite);
  Eigen::MatrixXd thin = Eigen::MatrixXd::Identity(2, 2);
  thin(1, 1) = 1e-20;
  EXPECT_EQ(error_of([&] { enumerate_by_norm(thin, 1.0, none); }), Errc::BoundTooLarge);
}

TEST(Enumerate, RankZeroVisitsOrigin) {
  std::size_t calls = 0;
  EXPECT_EQ(enumerate_by_norm(Eigen::MatrixXd(0, 0), 1.0, [&](std::span<const std::int64_t> c, double n) {
              EXPECT_TRUE(c.empty());
              EXPECT_EQ(n, 0.0);
              ++calls;
            }),
            1u);
  EXPECT_EQ(calls, 1u);
}

TEST(GramSchmidt, ProductIsDeterminant) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd g = oracle::random_posdef(rng, 4);
    EXPECT_NEAR(gram_schmidt_norms(g).prod(), g.determinant(), 1e-10 * g.determinant());
  }
}
