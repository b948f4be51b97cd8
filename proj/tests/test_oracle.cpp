#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bed/bench.hpp"
#include "bed/errors.hpp"
#include "bed/oracle.hpp"
#include "bed/solver.hpp"
#include "support/support.hpp"

using namespace bed;

namespace {

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<double> hilbert(std::size_t n) {
    std::vector<double> h(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h[i * n + j] = 1.0 / static_cast<double>(i + j + 1);
    return h;
}

}  // namespace

TEST(Jacobi, Scalar) {
    const auto e = oracle::jacobi_eig(std::vector<double>{5.0}, 1);
    EXPECT_EQ(e.values, (std::vector<double>{5.0}));
    EXPECT_EQ(e.vectors, (std::vector<double>{1.0}));
}

TEST(Jacobi, TwoByTwo) {
    const auto e = oracle::jacobi_eig(std::vector<double>{2, 1, 1, 2}, 2);
    const auto v = sorted(e.values);
    EXPECT_NEAR(v[0], 1.0, 1e-15);
    EXPECT_NEAR(v[1], 3.0, 1e-15);
}

TEST(Jacobi, HilbertDeterminantCrossCheck) {
    const auto h = hilbert(4);
    const auto e = oracle::jacobi_eig(h, 4);
    double product = 1.0;
    for (double l : e.values) product *= l;
    const double det = oracle::determinant(h, 4);
    EXPECT_NEAR(product, det, 1e-12 * std::abs(det));
    // Frozen from the run above: det(H4) = 1 / 6048000.
    EXPECT_NEAR(det, 1.0 / 6048000.0, 1e-12 / 6048000.0);
    const auto v = sorted(e.values);
    EXPECT_NEAR(v[0], 9.670230402258689e-05, 1e-15);
    EXPECT_NEAR(v[3], 1.500214280059243, 1e-14);
}

TEST(Jacobi, ReconstructionAndTraceProperty) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 1 + seed % 20;
        const auto a = bed::testing::random_symmetric(1, n, seed);
        const auto e = oracle::jacobi_eig(a.matrix(0), n);
        double tr = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tr += a(0, i, i);
            sum += e.values[i];
        }
        const double fa = frobenius_norm(a.matrix(0));
        ASSERT_NEAR(sum, tr, 1e-12 * fa);
        std::vector<double> r(a.matrix(0).begin(), a.matrix(0).end());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t c = 0; c < n; ++c)
                    r[i * n + j] -= e.vectors[i * n + c] * e.values[c] * e.vectors[j * n + c];
        ASSERT_LE(frobenius_norm(r), 1e-12 * fa) << "seed " << seed;
    }
}

TEST(ClosedForm, Examples) {
    EXPECT_EQ(oracle::closed_form_eig(std::vector<double>{2, 1, 1, 2}, 2), (std::vector<double>{1, 3}));
    const auto d = oracle::closed_form_eig(std::vector<double>{1, 0, 0, 0, 2, 0, 0, 0, 3}, 3);
    EXPECT_NEAR(d[0], 1.0, 1e-15);
    EXPECT_NEAR(d[1], 2.0, 1e-15);
    EXPECT_NEAR(d[2], 3.0, 1e-15);
    const auto q = oracle::closed_form_eig(std::vector<double>{5, 2, 2, 1}, 2);
    EXPECT_NEAR(q[0], 3.0 - 2.0 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(q[1], 3.0 + 2.0 * std::sqrt(2.0), 1e-15);
    EXPECT_THROW(oracle::closed_form_eig(std::vector<double>(16), 4), ShapeMismatch);
}

TEST(ClosedForm, AgreesWithJacobiProperty) {
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const std::size_t n = 2 + seed % 2;
        const auto a = bed::testing::random_symmetric(1, n, seed);
        const auto cf = oracle::closed_form_eig(a.matrix(0), n);
        const auto j = sorted(oracle::jacobi_eig(a.matrix(0), n).values);
        ASSERT_LE(bed::testing::max_abs_diff(cf, j), 1e-12 * std::max(1.0, frobenius_norm(a.matrix(0))))
            << "seed " << seed;
    }
}

TEST(Determinant, Basics) {
    EXPECT_DOUBLE_EQ(oracle::determinant(std::vector<double>{2, 1, 1, 2}, 2), 3.0);
    EXPECT_DOUBLE_EQ(oracle::determinant(std::vector<double>{0, 1, 1, 0}, 2), -1.0);
    EXPECT_EQ(oracle::determinant(std::vector<double>{1, 2, 2, 4}, 2), 0.0);
}

TEST(EigenvalueError, DirectDifference) {
    EXPECT_DOUBLE_EQ(oracle::eigenvalue_error(std::vector<double>{3, 1}, std::vector<double>{3, 1 + 1e-9}),
                     (1 + 1e-9) - 1.0);
    EXPECT_THROW(oracle::eigenvalue_error(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeMismatch);
}

TEST(EigenvalueError, SymmetricUnderSwap) {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(7), y(7);
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = rng.normal();
        ASSERT_EQ(oracle::eigenvalue_error(x, y), oracle::eigenvalue_error(y, x));
    }
}

TEST(Compare, IdentityAllZero) {
    const auto a = BatchedSymmetric::identity(3, 4);
    const auto e = batched_eig(a);
    const auto ref = oracle::reference_solutions(a);
    for (const auto& r : oracle::compare(a, e, ref)) {
        EXPECT_EQ(r.max_abs_eigenvalue_error, 0.0);
        EXPECT_EQ(r.max_subspace_angle, 0.0);
        EXPECT_EQ(r.reconstruction_residual, 0.0);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Compare, DetectsEigenvalueShift) {
    const BatchedSymmetric a(1, 2, {2, 1, 1, 2});
    auto e = batched_eig(a);
    const auto ref = oracle::reference_solutions(a);
    e.eigenvalues[1] += 1e-9;
    const auto r = oracle::compare(a, e, ref);
    EXPECT_NEAR(r[0].max_abs_eigenvalue_error, 1e-9, 1e-15);
    e.eigenvalues[1] += 1e-3;
    EXPECT_FALSE(oracle::compare(a, e, ref)[0].pass);
}

TEST(Compare, SixtyFourBySixteenSuite) {
    const auto a = bench::gen_spd(64, 16, 42, 3.0);
    const auto e = batched_eig(a);
    const auto ref = oracle::reference_solutions(a);
    for (const auto& r : oracle::compare(a, e, ref)) {
        EXPECT_LE(r.max_abs_eigenvalue_error, 1e-8);
    }
}

TEST(Compare, RepeatedEigenvaluesComparedAsSubspace) {
    // diag(2, 2, 5) rotated: the 2-cluster has no unique basis.
    const double c = std::cos(0.3), s = std::sin(0.3);
    const std::vector<double> q{c, -s, 0, s, c, 0, 0, 0, 1};
    const std::vector<double> d{2, 0, 0, 0, 2, 0, 0, 0, 5};
    const auto m = bed::testing::matmul(bed::testing::matmul(q, d, 3), bed::testing::transpose(q, 3), 3);
    BatchedSymmetric a(1, 3, m);
    a = validate(a);
    const auto e = batched_eig(a);
    const auto ref = oracle::reference_solutions(a);
    const auto r = oracle::compare(a, e, ref);
    EXPECT_LE(r[0].max_subspace_angle, 1e-8);
    EXPECT_TRUE(r[0].pass);
}

TEST(Compare, ShapeErrors) {
    const auto a = BatchedSymmetric::identity(2, 3);
    const auto e = batched_eig(a);
    const auto ref = oracle::reference_solutions(BatchedSymmetric::identity(1, 3));
    EXPECT_THROW(oracle::compare(a, e, ref), ShapeMismatch);
}
