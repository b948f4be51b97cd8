#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bed::testing {

std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

std::vector<double> transpose(std::span<const double> a, std::size_t n) {
    std::vector<double> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * n + i] = a[i * n + j];
    return t;
}

std::vector<double> identity(std::size_t n) {
    std::vector<double> id(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
    return id;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double max_abs(std::span<const double> a) {
    double worst = 0.0;
    for (double x : a) worst = std::max(worst, std::abs(x));
    return worst;
}

BatchedSymmetric random_symmetric(std::size_t batch, std::size_t dim, std::uint64_t seed) {
    BatchedSymmetric a(batch, dim);
    Rng rng(seed);
    for (std::size_t k = 0; k < batch; ++k)
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) a(k, i, j) = a(k, j, i) = rng.normal();
    return a;
}

TridiagonalBatch random_tridiagonal(std::size_t batch, std::size_t dim, std::uint64_t seed) {
    TridiagonalBatch t(batch, dim);
    Rng rng(seed);
    for (auto& x : t.diag) x = rng.normal();
    for (auto& x : t.offdiag) x = rng.normal();
    return t;
}

std::vector<double> explicit_reflector(std::span<const double> u) {
    const std::size_t n = u.size();
    double norm2 = 0.0;
    for (double x : u) norm2 += x * x;
    auto h = identity(n);
    if (norm2 == 0.0) return h;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h[i * n + j] -= 2.0 * u[i] * u[j] / norm2;
    return h;
}

std::vector<double> embedded_rotation(std::size_t n, std::size_t i, Rotation rot) {
    auto g = identity(n);
    g[i * n + i] = rot.c;
    g[i * n + i + 1] = rot.s;
    g[(i + 1) * n + i] = -rot.s;
    g[(i + 1) * n + i + 1] = rot.c;
    return g;
}

void dense_shifted_sweep(std::vector<double>& t, std::vector<double>& q, std::size_t n,
                         std::size_t m, double mu, std::size_t& rotations) {
    std::vector<double> r = t;
    for (std::size_t i = 0; i < m; ++i) r[i * n + i] -= mu;
    std::vector<Rotation> rots;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const Rotation rot = make_givens(r[i * n + i], r[(i + 1) * n + i]);
        const auto g = embedded_rotation(n, i, rot);
        r = matmul(transpose(g, n), r, n);
        rots.push_back(rot);
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto g = embedded_rotation(n, i, rots[i]);
        r = matmul(r, g, n);
        q = matmul(q, g, n);
    }
    for (std::size_t i = 0; i < m; ++i) r[i * n + i] += mu;
    // Only the active block is iterated; the locked part is carried over unchanged.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) t[i * n + j] = r[i * n + j];
    rotations += m - 1;
}

namespace {

ShiftValues trailing(const std::vector<double>& t, std::size_t n, std::size_t m) {
    return wilkinson_pair(t[(m - 2) * n + m - 2], t[(m - 1) * n + m - 2], t[(m - 1) * n + m - 1]);
}

bool deflate(const std::vector<double>& t, std::size_t n, std::size_t& m, double tol) {
    bool any = false;
    while (m > 2 && std::abs(t[(m - 1) * n + m - 2]) < tol) {
        --m;
        any = true;
    }
    return any;
}

}  // namespace

DenseRun dense_diagonalize(std::span<const double> t0, std::span<const double> p0, std::size_t n,
                           double deflation_tol, std::size_t max_double_steps) {
    DenseRun run;
    run.t.assign(t0.begin(), t0.end());
    run.vectors.assign(p0.begin(), p0.end());
    std::size_t m = n;
    deflate(run.t, n, m, deflation_tol);
    while (m > 2) {
        if (run.double_steps >= max_double_steps) throw std::runtime_error("dense route did not converge");
        const ShiftValues shifts = trailing(run.t, n, m);
        dense_shifted_sweep(run.t, run.vectors, n, m, shifts.hi, run.rotations);
        if (deflate(run.t, n, m, deflation_tol)) {
            if (m > 2) dense_shifted_sweep(run.t, run.vectors, n, m, shifts.lo, run.rotations);
        } else {
            dense_shifted_sweep(run.t, run.vectors, n, m, trailing(run.t, n, m).hi, run.rotations);
        }
        ++run.double_steps;
        deflate(run.t, n, m, deflation_tol);
    }
    if (m == 2) {
        const double a = run.t[0], b = run.t[n], d = run.t[n + 1];
        const Rotation rot = symmetric_schur(a, b, d);
        if (!(rot.c == 1.0 && rot.s == 0.0)) {
            const auto g = embedded_rotation(n, 0, rot);
            const ShiftValues v = wilkinson_pair(a, b, d);
            run.t[0] = v.lo;
            run.t[n + 1] = v.hi;
            run.t[1] = run.t[n] = 0.0;
            run.vectors = matmul(run.vectors, g, n);
        }
    }
    return run;
}

}  // namespace bed::testing
