#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bed/tensor.hpp"

namespace bed {

// Reflector vectors u for every reduction step. Step i annihilates column i below
// the sub-diagonal; its vector is zero in entries 0..i (structural prefix), and
// H_i = I - 2 u u^T / ||u||^2. A zero vector denotes H_i = I.
struct ReflectorSet {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::vector<double> vectors;  // steps x batch x dim
    std::vector<double> norms;    // steps x batch, ||u||^2

    ReflectorSet() = default;
    ReflectorSet(std::size_t batch, std::size_t dim);

    std::size_t steps() const { return dim > 2 ? dim - 2 : 0; }

    std::span<double> vector(std::size_t step, std::size_t k) {
        return {vectors.data() + (step * batch + k) * dim, dim};
    }
    std::span<const double> vector(std::size_t step, std::size_t k) const {
        return {vectors.data() + (step * batch + k) * dim, dim};
    }
    double& norm(std::size_t step, std::size_t k) { return norms[step * batch + k]; }
    double norm(std::size_t step, std::size_t k) const { return norms[step * batch + k]; }
};

// I - 2 W Y^T for one run of consecutive reflectors; w and y are batch x dim x count.
struct WyFactors {
    std::size_t batch = 0;
    std::size_t dim = 0;
    std::size_t first_step = 0;
    std::size_t count = 0;
    BatchedMatrix w;
    BatchedMatrix y;

    // Dense I - 2 W Y^T.
    BatchedMatrix expand() const;
};

struct HouseholderVectors {
    std::vector<double> u;      // batch x dim
    std::vector<double> sigma;  // batch
};

// Column tails with norm at or below this are treated as already reduced.
inline constexpr double kZeroTailNorm = 1e-300;

// Builds the reflector for reduction step i from the partially reduced batch.
// sigma carries the sign of the pivot a(i+1, i) (+1 for a zero pivot); the reflector
// maps the column tail to (-sigma, 0, ..., 0).
HouseholderVectors householder_vector(const BatchedSymmetric& a, std::size_t step);

// H A H for every matrix, as the symmetric rank-2 update A - q u^T - u q^T with
// p = 2 A u / ||u||^2, K = u^T p / ||u||^2, q = p - K u. u is batch x dim.
BatchedSymmetric rank2_update(const BatchedSymmetric& a, std::span<const double> u);

// Applies max(dim - 2, 0) reflections. The band exterior is dropped when the
// result is stored compactly. The transform P (T = P^T A P) is attached when
// cfg.compute_vectors is set, accumulated with WY blocks when cfg selects them.
std::pair<TridiagonalBatch, ReflectorSet> tridiagonalize(const BatchedSymmetric& a,
                                                         const SolverConfig& cfg = {});

// P = H_0 H_1 ... H_{dim-3}, one reflector at a time.
BatchedMatrix accumulate_reflectors(const ReflectorSet& r);

// WY factors for reflectors [first_step, first_step + count).
WyFactors wy_factors(const ReflectorSet& r, std::size_t first_step, std::size_t count);

// Same product as accumulate_reflectors, formed from WY blocks of `block`
// consecutive reflectors (the last block may be shorter). Throws BlockTooLarge
// when block > dim - 2, std::invalid_argument when block == 0.
BatchedMatrix wy_accumulate(const ReflectorSet& r, std::size_t block);

namespace detail {

// Per-matrix kernels on a dense row-major n x n working matrix.
double build_reflector(std::span<const double> a, std::size_t n, std::size_t step,
                       std::span<double> u);
void apply_rank2(std::span<double> a, std::size_t n, std::span<const double> u, double unorm2,
                 std::span<double> scratch);

}  // namespace detail

}  // namespace bed
