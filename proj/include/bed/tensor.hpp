#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bed/errors.hpp"

namespace bed {

// A batch of dense rows x cols matrices, batch outermost, each matrix row-major.
struct BatchedMatrix {
    std::size_t batch = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    BatchedMatrix() = default;
    BatchedMatrix(std::size_t batch, std::size_t rows, std::size_t cols);
    BatchedMatrix(std::size_t batch, std::size_t rows, std::size_t cols, std::vector<double> values);

    static BatchedMatrix identity(std::size_t batch, std::size_t n);

    std::size_t matrix_size() const { return rows * cols; }

    std::span<double> matrix(std::size_t k) {
        return {data.data() + k * matrix_size(), matrix_size()};
    }
    std::span<const double> matrix(std::size_t k) const {
        return {data.data() + k * matrix_size(), matrix_size()};
    }

    double& operator()(std::size_t k, std::size_t i, std::size_t j) {
        return data[k * matrix_size() + i * cols + j];
    }
    double operator()(std::size_t k, std::size_t i, std::size_t j) const {
        return data[k * matrix_size() + i * cols + j];
    }

    bool operator==(const BatchedMatrix&) const = default;
};

// A batch of symmetric dim x dim matrices. Symmetry is established by validate();
// the constructors only check shapes.
struct BatchedSymmetric {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> data;

    BatchedSymmetric() = default;
    BatchedSymmetric(std::size_t batch, std::size_t dim);
    BatchedSymmetric(std::size_t batch, std::size_t dim, std::vector<double> values);

    static BatchedSymmetric identity(std::size_t batch, std::size_t dim);
    // Throws DimMismatch unless m.rows == m.cols.
    static BatchedSymmetric from_matrix(BatchedMatrix m);
    BatchedMatrix to_matrix() const;

    std::size_t matrix_size() const { return dim * dim; }

    std::span<double> matrix(std::size_t k) {
        return {data.data() + k * matrix_size(), matrix_size()};
    }
    std::span<const double> matrix(std::size_t k) const {
        return {data.data() + k * matrix_size(), matrix_size()};
    }

    double& operator()(std::size_t k, std::size_t i, std::size_t j) {
        return data[k * matrix_size() + i * dim + j];
    }
    double operator()(std::size_t k, std::size_t i, std::size_t j) const {
        return data[k * matrix_size() + i * dim + j];
    }

    bool operator==(const BatchedSymmetric&) const = default;
};

// Compact symmetric tridiagonal storage: diag is batch x dim, offdiag is
// batch x (dim - 1) holding t(i+1, i) = t(i, i+1).
struct TridiagonalBatch {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> diag;
    std::vector<double> offdiag;
    std::optional<BatchedMatrix> transform;

    TridiagonalBatch() = default;
    TridiagonalBatch(std::size_t batch, std::size_t dim);

    std::size_t off_size() const { return dim > 0 ? dim - 1 : 0; }

    std::span<double> diag_of(std::size_t k) { return {diag.data() + k * dim, dim}; }
    std::span<const double> diag_of(std::size_t k) const { return {diag.data() + k * dim, dim}; }
    std::span<double> off_of(std::size_t k) { return {offdiag.data() + k * off_size(), off_size()}; }
    std::span<const double> off_of(std::size_t k) const {
        return {offdiag.data() + k * off_size(), off_size()};
    }

    // Expands the band back into dense symmetric matrices.
    BatchedSymmetric densify() const;
};

enum class SortOrder { descending, ascending, none };

struct SolverConfig {
    // Batch-wide threshold on the trailing sub-diagonal entry for shrinking the active block.
    double deflation_tol = 1e-5;
    // Cap on double-shift iterations; unset means 2 * dim.
    std::optional<std::size_t> max_double_steps;
    bool compute_vectors = true;
    SortOrder sort = SortOrder::descending;
    // Block size for WY accumulation of the Householder transform. Unset selects the
    // default (disabled below dim 16, 4 otherwise); 0 disables explicitly.
    std::optional<std::size_t> wy_block;
    // Relative asymmetry accepted (and removed) by validate().
    double symmetry_tol = 1e-12;
    // When false the active block never shrinks and exactly max_double_steps double
    // steps run with no convergence check. A cost baseline only: results are not
    // guaranteed to have converged.
    bool progressive_shrinkage = true;

    // Throws std::invalid_argument for a negative tolerance or a zero step cap, and
    // BlockTooLarge when an explicit wy_block exceeds dim - 2.
    void check(std::size_t dim) const;

    std::size_t effective_max_double_steps(std::size_t dim) const;
    // 0 means the naive product is used.
    std::size_t effective_wy_block(std::size_t dim) const;
};

// Checks that every entry is finite and every matrix is symmetric within
// symmetry_tol * max(1, ||A||_F), then returns the exactly symmetrized copy (a + a^T) / 2.
BatchedSymmetric validate(const BatchedSymmetric& a, const SolverConfig& cfg = {});

// Throws NonFinite on the first NaN/Inf entry.
void check_finite(const BatchedMatrix& m);

double frobenius_norm(std::span<const double> values);

}  // namespace bed
