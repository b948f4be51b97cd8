#include "bed/solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bed/householder.hpp"

namespace bed {

void sort_and_normalize(EigenResult& e, SortOrder order) {
    const std::size_t n = e.dim;
    std::vector<std::size_t> perm(n);
    std::vector<double> values(n);
    std::vector<double> columns(n * n);
    for (std::size_t k = 0; k < e.batch; ++k) {
        auto lam = std::span<double>(e.eigenvalues).subspan(k * n, n);
        std::iota(perm.begin(), perm.end(), 0);
        if (order == SortOrder::descending) {
            std::stable_sort(perm.begin(), perm.end(), [&](auto i, auto j) { return lam[i] > lam[j]; });
        } else if (order == SortOrder::ascending) {
            std::stable_sort(perm.begin(), perm.end(), [&](auto i, auto j) { return lam[i] < lam[j]; });
        }
        for (std::size_t j = 0; j < n; ++j) values[j] = lam[perm[j]];
        std::copy(values.begin(), values.end(), lam.begin());

        if (!e.eigenvectors) continue;
        auto v = e.eigenvectors->matrix(k);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t src = perm[j];
            std::size_t pivot = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(v[i * n + src]) > std::abs(v[pivot * n + src])) pivot = i;
            const double sign = v[pivot * n + src] < 0.0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i) columns[i * n + j] = sign * v[i * n + src];
        }
        std::copy(columns.begin(), columns.end(), v.begin());
    }
}

EigenResult batched_eig(const BatchedSymmetric& a, const SolverConfig& cfg) {
    cfg.check(a.dim);
    const BatchedSymmetric valid = validate(a, cfg);
    auto [t, reflectors] = tridiagonalize(valid, cfg);
    DiagonalizeResult d = diagonalize(t, cfg);

    EigenResult e;
    e.batch = d.batch;
    e.dim = d.dim;
    e.eigenvalues = std::move(d.eigenvalues);
    e.eigenvectors = std::move(d.vectors);
    e.diagnostics = d.diagnostics;
    sort_and_normalize(e, cfg.sort);
    return e;
}

namespace {

bool needs_positive_spectrum(double p) { return p < 0.0 || p != std::floor(p); }

// Subtracts each channel's mean over the samples.
void center_rows(std::span<const double> x, std::size_t channels, std::size_t samples,
                 std::vector<double>& out) {
    for (std::size_t i = 0; i < channels; ++i) {
        double mean = 0.0;
        for (std::size_t t = 0; t < samples; ++t) mean += x[i * samples + t];
        mean /= static_cast<double>(samples);
        for (std::size_t t = 0; t < samples; ++t) out[i * samples + t] = x[i * samples + t] - mean;
    }
}

}  // namespace

BatchedMatrix matrix_power(const EigenResult& e, double p, std::optional<double> floor) {
    if (!e.eigenvectors) throw std::invalid_argument("matrix_power requires eigenvectors");
    if (floor && !(*floor >= 0.0)) throw std::invalid_argument("eigenvalue floor must be nonnegative");
    const std::size_t n = e.dim;
    BatchedMatrix out(e.batch, n, n);
    std::vector<double> f(n);
    for (std::size_t k = 0; k < e.batch; ++k) {
        auto lam = e.values_of(k);
        if (needs_positive_spectrum(p)) {
            const double lmax = *std::max_element(lam.begin(), lam.end());
            const double lmin = *std::min_element(lam.begin(), lam.end());
            const double fl = floor ? *floor : 1e-12 * std::max(lmax, 0.0);
            if (fl == 0.0 && lmin <= 0.0) throw NonPositiveSpectrum(k, lmin);
            for (std::size_t j = 0; j < n; ++j) f[j] = std::pow(std::max(lam[j], fl), p);
        } else {
            for (std::size_t j = 0; j < n; ++j) f[j] = std::pow(lam[j], p);
        }
        auto v = e.eigenvectors->matrix(k);
        auto o = out.matrix(k);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < n; ++c) s += v[i * n + c] * f[c] * v[j * n + c];
                o[i * n + j] = s;
                o[j * n + i] = s;
            }
        }
    }
    return out;
}

BatchedSymmetric scatter_matrix(const BatchedMatrix& x, double eps_reg) {
    const std::size_t c = x.rows;
    const std::size_t n = x.cols;
    if (c == 0 || n == 0) throw ShapeMismatch("features need at least one channel and one sample");
    BatchedSymmetric s(x.batch, c);
    std::vector<double> centered(c * n);
    for (std::size_t k = 0; k < x.batch; ++k) {
        auto xk = x.matrix(k);
        center_rows(xk, c, n, centered);
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = i; j < c; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < n; ++t) acc += centered[i * n + t] * centered[j * n + t];
                s(k, i, j) = acc;
                s(k, j, i) = acc;
            }
            s(k, i, i) += eps_reg;
        }
    }
    return s;
}

BatchedMatrix zca_whiten(const BatchedMatrix& x, double eps_reg, const SolverConfig& cfg) {
    if (!(eps_reg >= 0.0)) throw std::invalid_argument("eps_reg must be nonnegative");
    check_finite(x);
    const std::size_t c = x.rows;
    const std::size_t n = x.cols;
    const BatchedSymmetric cov = scatter_matrix(x, eps_reg);

    SolverConfig solve_cfg = cfg;
    solve_cfg.compute_vectors = true;
    const EigenResult e = batched_eig(cov, solve_cfg);

    if (eps_reg == 0.0) {
        // Rounding keeps a singular scatter matrix's smallest eigenvalue near zero
        // rather than at it; treat anything at the rounding level as singular.
        for (std::size_t k = 0; k < e.batch; ++k) {
            auto lam = e.values_of(k);
            const double lmax = *std::max_element(lam.begin(), lam.end());
            const double lmin = *std::min_element(lam.begin(), lam.end());
            if (lmin <= static_cast<double>(c) * DBL_EPSILON * std::max(lmax, 0.0))
                throw NonPositiveSpectrum(k, lmin);
        }
    }
    const BatchedMatrix w = matrix_power(e, -0.5, eps_reg == 0.0 ? std::optional<double>(0.0) : std::nullopt);

    BatchedMatrix out(x.batch, c, n);
    std::vector<double> centered(c * n);
    for (std::size_t k = 0; k < x.batch; ++k) {
        auto xk = x.matrix(k);
        center_rows(xk, c, n, centered);
        auto wk = w.matrix(k);
        auto ok = out.matrix(k);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double wij = wk[i * c + j];
                for (std::size_t t = 0; t < n; ++t) ok[i * n + t] += wij * centered[j * n + t];
            }
    }
    return out;
}

}  // namespace bed
