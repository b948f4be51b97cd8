#include "bed/qr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace bed {

namespace {

// sqrt(x^2 + y^2); falls back to std::hypot only when squaring could over- or underflow.
inline double norm2d(double x, double y) {
    constexpr double kLo = 0x1.0p-500;
    constexpr double kHi = 0x1.0p+500;
    const double big = std::max(std::abs(x), std::abs(y));
    if (big < kHi && big > kLo) return std::sqrt(x * x + y * y);
    return std::hypot(x, y);
}

}  // namespace

Rotation make_givens(double x1, double x2) {
    if (x2 == 0.0) return x1 < 0.0 ? Rotation{-1.0, 0.0} : Rotation{1.0, 0.0};
    const double inv = 1.0 / norm2d(x1, x2);
    return {x1 * inv, -x2 * inv};
}

GivensCoeffs givens_coeffs(std::span<const double> x1, std::span<const double> x2,
                           std::size_t position) {
    if (x1.size() != x2.size()) throw ShapeMismatch("givens_coeffs: batch sizes differ");
    GivensCoeffs g{std::vector<double>(x1.size()), std::vector<double>(x1.size()), position};
    for (std::size_t k = 0; k < x1.size(); ++k) {
        const Rotation rot = make_givens(x1[k], x2[k]);
        g.c[k] = rot.c;
        g.s[k] = rot.s;
    }
    return g;
}

namespace {

// tan of the rotation angle zeroing the off-diagonal of [[a, b], [b, d]]: the root of
// n^2 - 2 m n - 1 = 0 (m = (a - d) / 2b) with |n| <= 1, written without cancellation.
// Returns false when b == 0 or m is not representable.
bool schur_tangent(double a, double b, double d, double& n) {
    if (b == 0.0) return false;
    const double m = (a - d) / (2.0 * b);
    if (!std::isfinite(m)) return false;
    const double root = std::abs(m) + norm2d(1.0, m);
    n = (m < 0.0 ? 1.0 : -1.0) / root;
    return true;
}

}  // namespace

Rotation symmetric_schur(double a, double b, double d) {
    double n = 0.0;
    if (!schur_tangent(a, b, d, n)) return {};
    const double c = 1.0 / std::sqrt(1.0 + n * n);
    return {c, c * n};
}

ShiftValues wilkinson_pair(double a, double b, double d) {
    double n = 0.0;
    if (!schur_tangent(a, b, d, n)) return {a, d};
    // Rotated diagonal: a c^2 - 2 b c s + d s^2 = a - n b and a s^2 + 2 b c s + d c^2 = d + n b.
    return {a - n * b, d + n * b};
}

ShiftPair wilkinson_shifts(std::span<const double> a, std::span<const double> b,
                           std::span<const double> d) {
    if (a.size() != b.size() || a.size() != d.size())
        throw ShapeMismatch("wilkinson_shifts: batch sizes differ");
    ShiftPair out{std::vector<double>(a.size()), std::vector<double>(a.size())};
    for (std::size_t k = 0; k < a.size(); ++k) {
        const ShiftValues v = wilkinson_pair(a[k], b[k], d[k]);
        out.mu_lo[k] = v.lo;
        out.mu_hi[k] = v.hi;
    }
    return out;
}

namespace {

struct RowWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
};

RowWindow merge(RowWindow x, RowWindow y) {
    if (x.begin >= x.end) return y;
    if (y.begin >= y.end) return x;
    return {std::min(x.begin, y.begin), std::max(x.end, y.end)};
}

// q * G on columns (i, i + 1) of a row-major matrix with `cols` columns.
inline void rotate_columns(double* q, std::size_t cols, std::size_t i, Rotation rot,
                           RowWindow rows) {
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
        double* row = q + r * cols;
        const double x = row[i];
        const double y = row[i + 1];
        row[i] = rot.c * x - rot.s * y;
        row[i + 1] = rot.s * x + rot.c * y;
    }
}

// One explicit shifted QR iteration on the leading m x m block (m >= 2) of a compact
// tridiagonal. Left rotation i is generated from the current (i, i) entry of the
// partially reduced T - mu I and the untouched sub-diagonal b_i; the right-hand
// product R Q is folded in immediately, so step i reads d[i+1], e[i], e[i+1] and
// writes d[i], e[i-1] only.
void sweep_block(double* d, double* e, std::size_t m, double mu, Rotation* rots) {
    double x = d[0] - mu;  // R(i, i) before rotation i
    double z = e[0];       // R(i, i+1) before rotation i
    double c_prev = 1.0;
    double s_prev = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double b = e[i];
        const Rotation rot = make_givens(x, b);
        const double next_diag = d[i + 1] - mu;
        const double r = rot.c * x - rot.s * b;
        const double f = rot.c * z - rot.s * next_diag;
        const double nx = rot.s * z + rot.c * next_diag;
        const double nz = i + 2 < m ? rot.c * e[i + 1] : 0.0;

        if (i > 0) e[i - 1] = -s_prev * r;
        d[i] = rot.c * c_prev * r - rot.s * f + mu;
        if (rots != nullptr) rots[i] = rot;

        c_prev = rot.c;
        s_prev = rot.s;
        x = nx;
        z = nz;
    }
    d[m - 1] = c_prev * x + mu;
    e[m - 2] = -s_prev * x;
}

}  // namespace

SweepState SweepState::start(const TridiagonalBatch& t, bool with_vectors) {
    SweepState s;
    s.batch = t.batch;
    s.dim = t.dim;
    s.diag = t.diag;
    s.offdiag = t.offdiag;
    s.active_dim = t.dim;
    if (!with_vectors) return s;

    s.vectors = t.transform ? *t.transform : BatchedMatrix::identity(t.batch, t.dim);
    const BatchedMatrix& v = *s.vectors;
    if (v.batch != t.batch || v.rows != t.dim || v.cols != t.dim)
        throw ShapeMismatch("transform shape does not match the tridiagonal batch");
    s.row_begin.assign(t.dim, 0);
    s.row_end.assign(t.dim, 0);
    for (std::size_t j = 0; j < t.dim; ++j) {
        RowWindow w;
        for (std::size_t k = 0; k < t.batch; ++k) {
            std::size_t lo = t.dim;
            std::size_t hi = 0;
            for (std::size_t i = 0; i < t.dim; ++i) {
                if (v(k, i, j) != 0.0) {
                    lo = std::min(lo, i);
                    hi = i + 1;
                }
            }
            if (lo < hi) w = merge(w, {lo, hi});
        }
        s.row_begin[j] = w.begin;
        s.row_end[j] = w.end;
    }
    return s;
}

TridiagonalBatch SweepState::tridiagonal() const {
    TridiagonalBatch t(batch, dim);
    t.diag = diag;
    t.offdiag = offdiag;
    return t;
}

void economic_q_update(BatchedMatrix& q, const GivensCoeffs& g, std::size_t row_begin,
                       std::size_t row_end) {
    if (g.position + 2 > q.cols) throw ShapeMismatch("rotation position outside the matrix");
    if (g.c.size() != q.batch || g.s.size() != q.batch)
        throw ShapeMismatch("rotation batch does not match matrix batch");
    const RowWindow rows{row_begin, std::min(row_end, q.rows)};
    for (std::size_t k = 0; k < q.batch; ++k)
        rotate_columns(q.matrix(k).data(), q.cols, g.position, {g.c[k], g.s[k]}, rows);
}

void economic_q_update(BatchedMatrix& q, const GivensCoeffs& g) {
    economic_q_update(q, g, 0, q.rows);
}

void shifted_sweep(SweepState& state, std::span<const double> mu) {
    const std::size_t m = state.active_dim;
    if (m < 2) throw std::logic_error("shifted_sweep needs an active block of at least 2");
    if (mu.size() != state.batch) throw ShapeMismatch("one shift per batch element required");

    // Row windows depend only on the rotation positions, so they are shared by the batch.
    std::vector<RowWindow> windows;
    if (state.vectors) {
        windows.resize(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const RowWindow w = merge({state.row_begin[i], state.row_end[i]},
                                      {state.row_begin[i + 1], state.row_end[i + 1]});
            windows[i] = w;
            state.row_begin[i] = state.row_begin[i + 1] = w.begin;
            state.row_end[i] = state.row_end[i + 1] = w.end;
        }
    }

    detail::parallel_for(state.batch, [&](std::size_t begin, std::size_t end) {
        std::vector<Rotation> rots(state.vectors ? m - 1 : 0);
        for (std::size_t k = begin; k < end; ++k) {
            sweep_block(state.diag_of(k).data(), state.off_of(k).data(), m, mu[k],
                        state.vectors ? rots.data() : nullptr);
            if (state.vectors) {
                double* q = state.vectors->matrix(k).data();
                for (std::size_t i = 0; i + 1 < m; ++i)
                    rotate_columns(q, state.dim, i, rots[i], windows[i]);
            }
        }
    });

    state.rotation_count += m - 1;
    state.sweeps += 1;
    state.reduction_sum += state.dim - m;
}

namespace {

std::vector<double> trailing_shifts(const SweepState& state, bool nearer_last) {
    const std::size_t m = state.active_dim;
    std::vector<double> mu(state.batch);
    for (std::size_t k = 0; k < state.batch; ++k) {
        auto d = state.diag_of(k);
        auto e = state.off_of(k);
        const ShiftValues v = wilkinson_pair(d[m - 2], e[m - 2], d[m - 1]);
        mu[k] = nearer_last ? v.hi : v.lo;
    }
    return mu;
}

}  // namespace

void double_shift_step(SweepState& state, std::optional<double> deflation_tol) {
    const std::size_t m = state.active_dim;
    if (m < 3) throw std::logic_error("double_shift_step needs an active block of at least 3");
    const std::vector<double> hi = trailing_shifts(state, true);
    const std::vector<double> lo = trailing_shifts(state, false);
    shifted_sweep(state, hi);
    if (!deflation_tol) {
        shifted_sweep(state, lo);
    } else if (try_deflate(state, *deflation_tol) > 0) {
        if (state.active_dim > 2) shifted_sweep(state, lo);
    } else {
        shifted_sweep(state, trailing_shifts(state, true));
    }
    state.double_steps += 1;
}

std::size_t try_deflate(SweepState& state, double tol) {
    std::size_t shrunk = 0;
    while (state.active_dim > 2) {
        const std::size_t pos = state.active_dim - 2;
        double worst = 0.0;
        for (std::size_t k = 0; k < state.batch; ++k)
            worst = std::max(worst, std::abs(state.off_of(k)[pos]));
        if (!(worst < tol)) break;
        state.active_dim -= 1;
        state.reductions += 1;
        ++shrunk;
    }
    return shrunk;
}

void finalize_small(SweepState& state) {
    if (state.active_dim > 2) throw std::logic_error("finalize_small needs an active block of at most 2");
    if (state.active_dim == 2) {
        RowWindow window;
        if (state.vectors) {
            window = merge({state.row_begin[0], state.row_end[0]}, {state.row_begin[1], state.row_end[1]});
            state.row_begin[0] = state.row_begin[1] = window.begin;
            state.row_end[0] = state.row_end[1] = window.end;
        }
        for (std::size_t k = 0; k < state.batch; ++k) {
            auto d = state.diag_of(k);
            auto e = state.off_of(k);
            const Rotation rot = symmetric_schur(d[0], e[0], d[1]);
            if (rot.s == 0.0 && rot.c == 1.0) continue;
            const ShiftValues v = wilkinson_pair(d[0], e[0], d[1]);
            d[0] = v.lo;
            d[1] = v.hi;
            e[0] = 0.0;
            if (state.vectors) rotate_columns(state.vectors->matrix(k).data(), state.dim, 0, rot, window);
        }
    }
    state.reductions += state.active_dim;
    state.active_dim = 0;
}

namespace {

[[noreturn]] void throw_no_convergence(const SweepState& state, double tol) {
    const std::size_t pos = state.active_dim - 2;
    std::vector<std::size_t> offenders;
    double worst = 0.0;
    for (std::size_t k = 0; k < state.batch; ++k) {
        const double v = std::abs(state.off_of(k)[pos]);
        if (!(v < tol)) offenders.push_back(k);
        worst = std::max(worst, v);
    }
    throw NoConvergence(std::move(offenders), worst, state.double_steps);
}

}  // namespace

DiagonalizeResult diagonalize(const TridiagonalBatch& t, const SolverConfig& cfg) {
    if (!(cfg.deflation_tol >= 0.0)) throw std::invalid_argument("deflation_tol must be nonnegative");
    const std::size_t cap = cfg.effective_max_double_steps(t.dim);
    SweepState state = SweepState::start(t, cfg.compute_vectors);
    std::size_t shrink_events = 0;

    if (cfg.progressive_shrinkage) {
        try_deflate(state, cfg.deflation_tol);
        while (state.active_dim > 2) {
            if (state.double_steps >= cap) throw_no_convergence(state, cfg.deflation_tol);
            double_shift_step(state, cfg.deflation_tol);
            try_deflate(state, cfg.deflation_tol);
        }
        shrink_events = state.reductions;
        finalize_small(state);
    } else if (state.dim <= 2) {
        finalize_small(state);
    } else {
        while (state.double_steps < cap) double_shift_step(state);
        state.reductions = state.dim;
        state.active_dim = 0;
    }

    DiagonalizeResult out;
    out.batch = state.batch;
    out.dim = state.dim;
    out.eigenvalues = std::move(state.diag);
    out.vectors = std::move(state.vectors);
    out.diagnostics = {state.double_steps, shrink_events, state.mean_reduction(),
                       state.rotation_count, state.sweeps};
    return out;
}

}  // namespace bed
