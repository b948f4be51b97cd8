#include "bed/householder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace bed {

ReflectorSet::ReflectorSet(std::size_t batch_, std::size_t dim_)
    : batch(batch_), dim(dim_) {
    vectors.assign(steps() * batch * dim, 0.0);
    norms.assign(steps() * batch, 0.0);
}

namespace detail {

double build_reflector(std::span<const double> a, std::size_t n, std::size_t step,
                       std::span<double> u) {
    std::fill(u.begin(), u.end(), 0.0);
    const std::size_t pivot = step + 1;
    if (pivot >= n) return 0.0;

    double scale = 0.0;
    for (std::size_t i = pivot; i < n; ++i) scale = std::max(scale, std::abs(a[i * n + step]));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = pivot; i < n; ++i) {
        const double x = a[i * n + step] / scale;
        sum += x * x;
    }
    const double tail_norm = scale * std::sqrt(sum);
    if (tail_norm <= kZeroTailNorm) return 0.0;

    const double x0 = a[pivot * n + step];
    const double sigma = x0 < 0.0 ? -tail_norm : tail_norm;
    u[pivot] = x0 + sigma;
    for (std::size_t i = pivot + 1; i < n; ++i) u[i] = a[i * n + step];
    return sigma;
}

void apply_rank2(std::span<double> a, std::size_t n, std::span<const double> u, double unorm2,
                 std::span<double> scratch) {
    if (unorm2 == 0.0) return;
    std::size_t lo = 0;
    while (lo < n && u[lo] == 0.0) ++lo;
    if (lo == n) return;

    auto q = scratch.first(n);
    // p = 2 A u / ||u||^2
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = a.data() + i * n;
        for (std::size_t j = lo; j < n; ++j) s += row[j] * u[j];
        q[i] = 2.0 * s / unorm2;
    }
    double up = 0.0;
    for (std::size_t j = lo; j < n; ++j) up += u[j] * q[j];
    const double k = up / unorm2;
    for (std::size_t j = lo; j < n; ++j) q[j] -= k * u[j];

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = std::max(i, lo); j < n; ++j) {
            const double delta = q[i] * u[j] + u[i] * q[j];
            a[i * n + j] -= delta;
            if (i != j) a[j * n + i] -= delta;
        }
    }
}

}  // namespace detail

HouseholderVectors householder_vector(const BatchedSymmetric& a, std::size_t step) {
    if (a.dim < 3 || step > a.dim - 3)
        throw std::out_of_range("reflection step must satisfy 0 <= step <= dim - 3");
    HouseholderVectors out{std::vector<double>(a.batch * a.dim, 0.0), std::vector<double>(a.batch, 0.0)};
    for (std::size_t k = 0; k < a.batch; ++k) {
        out.sigma[k] = detail::build_reflector(a.matrix(k), a.dim, step,
                                               std::span<double>(out.u).subspan(k * a.dim, a.dim));
    }
    return out;
}

BatchedSymmetric rank2_update(const BatchedSymmetric& a, std::span<const double> u) {
    if (u.size() != a.batch * a.dim) throw ShapeMismatch("reflector batch does not match matrix batch");
    BatchedSymmetric out = a;
    std::vector<double> scratch(a.dim);
    for (std::size_t k = 0; k < a.batch; ++k) {
        auto uk = u.subspan(k * a.dim, a.dim);
        double norm2 = 0.0;
        for (double v : uk) norm2 += v * v;
        detail::apply_rank2(out.matrix(k), a.dim, uk, norm2, scratch);
    }
    return out;
}

std::pair<TridiagonalBatch, ReflectorSet> tridiagonalize(const BatchedSymmetric& a,
                                                         const SolverConfig& cfg) {
    const std::size_t n = a.dim;
    cfg.check(n);
    TridiagonalBatch t(a.batch, n);
    ReflectorSet r(a.batch, n);

    detail::parallel_for(a.batch, [&](std::size_t begin, std::size_t end) {
        std::vector<double> work(n * n);
        std::vector<double> scratch(n);
        for (std::size_t k = begin; k < end; ++k) {
            auto src = a.matrix(k);
            std::copy(src.begin(), src.end(), work.begin());
            for (std::size_t step = 0; step < r.steps(); ++step) {
                auto u = r.vector(step, k);
                detail::build_reflector(work, n, step, u);
                double norm2 = 0.0;
                for (double v : u) norm2 += v * v;
                r.norm(step, k) = norm2;
                detail::apply_rank2(work, n, u, norm2, scratch);
            }
            auto d = t.diag_of(k);
            auto e = t.off_of(k);
            for (std::size_t i = 0; i < n; ++i) d[i] = work[i * n + i];
            for (std::size_t i = 0; i + 1 < n; ++i) e[i] = work[(i + 1) * n + i];
        }
    });

    if (cfg.compute_vectors) {
        const std::size_t block = cfg.effective_wy_block(n);
        t.transform = block > 0 ? wy_accumulate(r, block) : accumulate_reflectors(r);
    }
    return {std::move(t), std::move(r)};
}

BatchedMatrix accumulate_reflectors(const ReflectorSet& r) {
    const std::size_t n = r.dim;
    BatchedMatrix p = BatchedMatrix::identity(r.batch, n);
    detail::parallel_for(r.batch, [&](std::size_t begin, std::size_t end) {
        std::vector<double> w(n);
        for (std::size_t k = begin; k < end; ++k) {
            auto pk = p.matrix(k);
            for (std::size_t step = 0; step < r.steps(); ++step) {
                auto u = r.vector(step, k);
                const double norm2 = r.norm(step, k);
                if (norm2 == 0.0) continue;
                const std::size_t lo = step + 1;
                // P <- P - (P u) (2 / ||u||^2) u^T
                for (std::size_t i = 0; i < n; ++i) {
                    double s = 0.0;
                    for (std::size_t j = lo; j < n; ++j) s += pk[i * n + j] * u[j];
                    w[i] = 2.0 * s / norm2;
                }
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = lo; j < n; ++j) pk[i * n + j] -= w[i] * u[j];
            }
        }
    });
    return p;
}

WyFactors wy_factors(const ReflectorSet& r, std::size_t first_step, std::size_t count) {
    if (count == 0 || first_step + count > r.steps())
        throw std::out_of_range("WY block outside the reflector range");
    const std::size_t n = r.dim;
    WyFactors f{r.batch, n, first_step, count, BatchedMatrix(r.batch, n, count),
                BatchedMatrix(r.batch, n, count)};
    std::vector<double> v(n);
    std::vector<double> coef(count);
    for (std::size_t k = 0; k < r.batch; ++k) {
        for (std::size_t t = 0; t < count; ++t) {
            const std::size_t step = first_step + t;
            auto u = r.vector(step, k);
            const double norm2 = r.norm(step, k);
            const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
            for (std::size_t i = 0; i < n; ++i) v[i] = u[i] * inv;
            // z = v - 2 W (Y^T v), using the t columns formed so far
            for (std::size_t c = 0; c < t; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += f.y(k, i, c) * v[i];
                coef[c] = 2.0 * s;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double z = v[i];
                for (std::size_t c = 0; c < t; ++c) z -= f.w(k, i, c) * coef[c];
                f.w(k, i, t) = z;
                f.y(k, i, t) = v[i];
            }
        }
    }
    return f;
}

BatchedMatrix WyFactors::expand() const {
    BatchedMatrix out = BatchedMatrix::identity(batch, dim);
    for (std::size_t k = 0; k < batch; ++k)
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < count; ++c) s += w(k, i, c) * y(k, j, c);
                out(k, i, j) -= 2.0 * s;
            }
    return out;
}

BatchedMatrix wy_accumulate(const ReflectorSet& r, std::size_t block) {
    if (block == 0) throw std::invalid_argument("WY block size must be positive");
    if (block > r.steps()) throw BlockTooLarge(block, r.steps());
    const std::size_t n = r.dim;

    std::vector<WyFactors> blocks;
    for (std::size_t first = 0; first < r.steps(); first += block)
        blocks.push_back(wy_factors(r, first, std::min(block, r.steps() - first)));

    BatchedMatrix p = BatchedMatrix::identity(r.batch, n);
    std::vector<double> pw(n * block);
    for (const auto& f : blocks) {
        const std::size_t m = f.count;
        for (std::size_t k = 0; k < r.batch; ++k) {
            auto pk = p.matrix(k);
            // P <- P - 2 (P W) Y^T
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < m; ++c) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += pk[i * n + j] * f.w(k, j, c);
                    pw[i * m + c] = 2.0 * s;
                }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < m; ++c) s += pw[i * m + c] * f.y(k, j, c);
                    pk[i * n + j] -= s;
                }
        }
    }
    return p;
}

}  // namespace bed
