#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bed/qr.hpp"
#include "bed/tensor.hpp"

namespace bed {

struct EigenResult {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> eigenvalues;  // batch x dim, ordered per SolverConfig::sort
    // Column j of matrix k pairs with eigenvalues[k * dim + j]. Absent when the
    // solve ran with compute_vectors = false.
    std::optional<BatchedMatrix> eigenvectors;
    Diagnostics diagnostics;

    std::span<const double> values_of(std::size_t k) const {
        return {eigenvalues.data() + k * dim, dim};
    }
};

// Full batched eigendecomposition A = V diag(lambda) V^T: validate, Householder
// tridiagonalization, then shifted QR diagonalization. Eigenvector columns are
// signed so that each column's largest-magnitude entry (lowest row on ties) is
// nonnegative.
EigenResult batched_eig(const BatchedSymmetric& a, const SolverConfig& cfg = {});

// Sorts each matrix's eigenpairs (values and vector columns jointly) and applies the
// sign convention. Used by batched_eig; exposed for callers that diagonalize directly.
void sort_and_normalize(EigenResult& e, SortOrder order);

// V diag(f(lambda)) V^T for f(x) = x^p. For p < 0 or non-integer p the eigenvalues are
// first raised to `floor`; an unset floor means 1e-12 * lambda_max, and 0 disables
// flooring (NonPositiveSpectrum when a matrix then has lambda_min <= 0).
BatchedMatrix matrix_power(const EigenResult& e, double p, std::optional<double> floor = std::nullopt);

// ZCA whitening of a batch x channels x samples feature batch:
// (S + eps I)^(-1/2) (X - mean), with S = (X - mean)(X - mean)^T unnormalized.
// With eps_reg = 0, a numerically singular S raises NonPositiveSpectrum.
BatchedMatrix zca_whiten(const BatchedMatrix& x, double eps_reg, const SolverConfig& cfg = {});

// (X - mean)(X - mean)^T + eps I per batch element.
BatchedSymmetric scatter_matrix(const BatchedMatrix& x, double eps_reg);

}  // namespace bed
