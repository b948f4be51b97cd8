#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bed/oracle.hpp"
#include "bed/solver.hpp"
#include "bed/tensor.hpp"

namespace bed::bench {

enum class Mode { values, full };

const char* to_string(Mode m);

struct BenchSpec {
    std::vector<std::size_t> dims{4, 8, 16, 32};
    std::vector<std::size_t> batches{64};
    std::size_t reps = 5;
    std::uint64_t seed = 42;
    Mode mode = Mode::full;
    double condition_decades = 3.0;

    // Throws std::invalid_argument unless dims >= 2, batches >= 1, reps >= 1.
    void check() const;
};

// Random SPD batch: each matrix is Q D Q^T with Q a product of dim Householder
// reflectors from normal vectors and D log-uniform over condition_decades decades
// above a random base scale in [1, 10). With zero decades every matrix is exactly
// lambda * I. Bit-reproducible for fixed (batch, dim, seed, decades).
BatchedSymmetric gen_spd(std::size_t batch, std::size_t dim, std::uint64_t seed,
                         double condition_decades);

struct BenchRow {
    std::size_t dim = 0;
    std::size_t batch = 0;
    Mode mode = Mode::full;
    double median_wall_s = 0.0;
    double per_matrix_s = 0.0;
    double mean_r = 0.0;
    double mean_k = 0.0;
    std::size_t rotations = 0;
    double max_eig_err = 0.0;  // relative to lambda_max, vs the Jacobi oracle
};

inline constexpr const char* kCsvHeader =
    "dim,batch,mode,median_wall_s,per_matrix_s,mean_r,mean_k,rotations,max_eig_err";

std::string csv_line(const BenchRow& row);

// Times batched_eig per (dim, batch) cell: one discarded warm-up, then the median of
// reps runs. Generation and oracle checks are outside the timed region.
std::vector<BenchRow> run_bench(const BenchSpec& spec);

// Least-squares slope of log(per_matrix_s) against log(dim) over the given rows.
double loglog_slope(const std::vector<BenchRow>& rows);

struct VerifyTolerances {
    double eigenvalue = 1e-8;       // vs oracle, relative to lambda_max
    double reconstruction = 1e-10;  // relative Frobenius residual
    double orthogonality = 1e-10;   // ||V^T V - I||_F / n
    double batch_consistency = 1e-8;
};

struct Failure {
    std::size_t dim = 0;
    std::size_t batch = 0;
    std::size_t index = 0;
    std::string reason;
};

struct VerifyCell {
    std::size_t dim = 0;
    std::size_t batch = 0;
    double max_eig_err = 0.0;
    double max_reconstruction = 0.0;
    double max_orthogonality = 0.0;
    double max_batch_gap = 0.0;
    std::size_t double_steps = 0;
    double mean_r = 0.0;
    std::size_t rotations = 0;
    bool converged = true;
    bool pass = true;
};

struct VerifyReport {
    std::vector<VerifyCell> cells;
    std::vector<Failure> failures;
    bool pass() const { return failures.empty(); }
};

struct VerifyOptions {
    VerifyTolerances tol;
    // Use the identity batch instead of random SPD input.
    bool identity_input = false;
    // Test hook: flips the sign of one eigenvalue after solving so the harness must fail.
    bool inject_fault = false;
    // Deflation threshold for every solve; unset keeps the solver default.
    std::optional<double> deflation_tol;
};

// Reconstruction, orthogonality, oracle agreement and batch-vs-single consistency
// over every (dim, batch) cell. Writes a per-cell table and the reduction-count
// distribution to `out`.
VerifyReport run_verify(const BenchSpec& spec, const VerifyOptions& opts, std::ostream& out);

// ||V^T V - I||_F for one row-major n x n matrix.
double orthogonality_error(std::span<const double> v, std::size_t n);

}  // namespace bed::bench
