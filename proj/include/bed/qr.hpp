#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bed/tensor.hpp"

namespace bed {

// Plane rotation acting on coordinates (i, i+1). Embedded in the identity it is
// G = [[c, s], [-s, c]] on that plane, so G^T (x1, x2)^T = (r, 0)^T for
// c = x1 / r, s = -x2 / r.
struct Rotation {
    double c = 1.0;
    double s = 0.0;
};

// (0, 0) yields the identity rotation.
Rotation make_givens(double x1, double x2);

struct GivensCoeffs {
    std::vector<double> c;
    std::vector<double> s;
    std::size_t position = 0;
};

GivensCoeffs givens_coeffs(std::span<const double> x1, std::span<const double> x2,
                           std::size_t position = 0);

// Eigenvalues of [[a, b], [b, d]] read off the diagonal after the rotation that
// zeroes the off-diagonal entry. hi is the eigenvalue nearer d.
struct ShiftValues {
    double lo = 0.0;
    double hi = 0.0;
};

ShiftValues wilkinson_pair(double a, double b, double d);

// Rotation diagonalizing [[a, b], [b, d]] with |angle| <= 45 degrees; identity when b == 0.
Rotation symmetric_schur(double a, double b, double d);

struct ShiftPair {
    std::vector<double> mu_lo;
    std::vector<double> mu_hi;
};

ShiftPair wilkinson_shifts(std::span<const double> a, std::span<const double> b,
                           std::span<const double> d);

// Iteration state of the batched QR diagonalization. diag/offdiag hold the full
// compact tridiagonal; only the leading active_dim block is still iterated, entries
// beyond it are locked eigenvalues.
struct SweepState {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> diag;     // batch x dim
    std::vector<double> offdiag;  // batch x (dim - 1)
    std::optional<BatchedMatrix> vectors;
    std::size_t active_dim = 0;
    std::size_t reductions = 0;    // dim - active_dim
    std::size_t double_steps = 0;
    std::size_t rotation_count = 0;
    std::size_t sweeps = 0;
    std::size_t reduction_sum = 0;  // sum over sweeps of (dim - active_dim) at the sweep

    // Per column of `vectors`: the row range that may hold nonzeros, identical for
    // every batch element. Rotations only touch rows inside the union of the two ranges.
    std::vector<std::size_t> row_begin;
    std::vector<std::size_t> row_end;

    // Starts from t. Vectors start from t.transform when present, otherwise from the
    // identity; with_vectors = false drops them.
    static SweepState start(const TridiagonalBatch& t, bool with_vectors);

    std::size_t off_size() const { return dim > 0 ? dim - 1 : 0; }
    std::span<double> diag_of(std::size_t k) { return {diag.data() + k * dim, dim}; }
    std::span<const double> diag_of(std::size_t k) const { return {diag.data() + k * dim, dim}; }
    std::span<double> off_of(std::size_t k) { return {offdiag.data() + k * off_size(), off_size()}; }
    std::span<const double> off_of(std::size_t k) const {
        return {offdiag.data() + k * off_size(), off_size()};
    }

    // Locked eigenvalues of matrix k: diag entries at and beyond active_dim.
    std::span<const double> locked(std::size_t k) const {
        return diag_of(k).subspan(active_dim);
    }

    // Average number of rows removed per executed sweep.
    double mean_reduction() const {
        return sweeps == 0 ? 0.0 : static_cast<double>(reduction_sum) / static_cast<double>(sweeps);
    }

    TridiagonalBatch tridiagonal() const;
};

// Rotates columns g.position and g.position + 1 of every matrix in q by G, restricted to
// rows [row_begin, row_end). Equals q * G whenever the rows outside the window are
// zero in both columns.
void economic_q_update(BatchedMatrix& q, const GivensCoeffs& g, std::size_t row_begin,
                       std::size_t row_end);
void economic_q_update(BatchedMatrix& q, const GivensCoeffs& g);

// One explicit shifted QR iteration on the active block of every matrix:
// T <- Q^T (T - mu I) Q + mu I with T - mu I = Q R factored by active_dim - 1
// rotations, left to right. mu is one value per batch element. Each rotation only
// reads and writes a fixed window of the band.
void shifted_sweep(SweepState& state, std::span<const double> mu);

// Shifts from the trailing 2x2 block, then a sweep with mu_hi followed by one with
// mu_lo. With a deflation tolerance the block is also offered for shrinking after the
// first sweep; if it did not shrink, the second sweep uses the mu_hi of the current
// trailing block instead of mu_lo. The second sweep is skipped once two or fewer
// rows remain active.
void double_shift_step(SweepState& state, std::optional<double> deflation_tol = std::nullopt);

// Shrinks the active block while the largest trailing sub-diagonal magnitude over
// the batch is below tol and more than two rows remain. Returns the shrink count.
std::size_t try_deflate(SweepState& state, double tol);

// Closes out an active block of size 1 or 2 exactly.
void finalize_small(SweepState& state);

struct Diagnostics {
    std::size_t double_steps = 0;
    std::size_t reductions = 0;  // shrink events before the closed-form close-out
    double mean_reduction = 0.0;
    std::size_t rotation_count = 0;
    std::size_t sweeps = 0;
};

struct DiagonalizeResult {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> eigenvalues;  // batch x dim, in position order
    std::optional<BatchedMatrix> vectors;
    Diagnostics diagnostics;
};

// Runs double_shift_step / try_deflate until at most two active rows remain, then
// finalize_small. Throws NoConvergence once cfg's step cap is exhausted.
DiagonalizeResult diagonalize(const TridiagonalBatch& t, const SolverConfig& cfg = {});

}  // namespace bed
