#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bed/qr.hpp"
#include "bed/random.hpp"
#include "bed/tensor.hpp"

namespace bed::testing {

// Dense row-major helpers for single matrices.
std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n);
std::vector<double> transpose(std::span<const double> a, std::size_t n);
std::vector<double> identity(std::size_t n);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);

// Symmetric matrices with N(0, 1) entries.
BatchedSymmetric random_symmetric(std::size_t batch, std::size_t dim, std::uint64_t seed);
// Random compact tridiagonals with N(0, 1) diagonal and off-diagonal entries.
TridiagonalBatch random_tridiagonal(std::size_t batch, std::size_t dim, std::uint64_t seed);

// I - 2 u u^T / ||u||^2 as a dense matrix.
std::vector<double> explicit_reflector(std::span<const double> u);

// Givens rotation on plane (i, i+1) embedded in the n x n identity.
std::vector<double> embedded_rotation(std::size_t n, std::size_t i, Rotation rot);

// Dense-rotation execution of the QR diagonalization for one matrix. Every
// rotation is applied as a full n x n matrix product, both to the iterate and to the
// accumulated vectors; shifts, the deflation gate and the close-out follow the same
// policy as bed::diagonalize with a batch of one.
struct DenseRun {
    std::vector<double> t;        // final dense iterate
    std::vector<double> vectors;  // accumulated P Q_0 ... Q_k
    std::size_t double_steps = 0;
    std::size_t rotations = 0;
};

// One dense shifted QR iteration on the leading m x m block of the n x n matrix t.
// Rotations are generated from the running partially reduced matrix.
void dense_shifted_sweep(std::vector<double>& t, std::vector<double>& q, std::size_t n,
                         std::size_t m, double mu, std::size_t& rotations);

DenseRun dense_diagonalize(std::span<const double> t0, std::span<const double> p0, std::size_t n,
                           double deflation_tol, std::size_t max_double_steps);

}  // namespace bed::testing
