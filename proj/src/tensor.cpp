#include "bed/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace bed {

namespace {

std::string format_message(const char* what, std::size_t batch_index, double value) {
    std::ostringstream os;
    os << what << " (batch index " << batch_index << ", value " << value << ")";
    return os.str();
}

void check_values_size(std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        std::ostringstream os;
        os << "expected " << expected << " values, got " << actual;
        throw DimMismatch(os.str());
    }
}

}  // namespace

NonSymmetric::NonSymmetric(std::size_t batch_index_, double max_asymmetry_)
    : Error(format_message("matrix is not symmetric", batch_index_, max_asymmetry_)),
      batch_index(batch_index_),
      max_asymmetry(max_asymmetry_) {}

NonFinite::NonFinite(std::size_t batch_index_, std::size_t row_, std::size_t col_)
    : Error("non-finite entry at batch " + std::to_string(batch_index_) + ", (" +
            std::to_string(row_) + ", " + std::to_string(col_) + ")"),
      batch_index(batch_index_),
      row(row_),
      col(col_) {}

BlockTooLarge::BlockTooLarge(std::size_t block_, std::size_t limit_)
    : Error("WY block size " + std::to_string(block_) + " exceeds dim - 2 = " +
            std::to_string(limit_)),
      block(block_),
      limit(limit_) {}

NoConvergence::NoConvergence(std::vector<std::size_t> batch_indices_, double residual,
                             std::size_t double_steps_)
    : Error("QR iteration did not converge after " + std::to_string(double_steps_) +
            " double steps; " + std::to_string(batch_indices_.size()) +
            " matrices above tolerance, max residual off-diagonal " + std::to_string(residual)),
      batch_indices(std::move(batch_indices_)),
      residual_offdiag_max(residual),
      double_steps(double_steps_) {}

NonPositiveSpectrum::NonPositiveSpectrum(std::size_t batch_index_, double min_eigenvalue_)
    : Error(format_message("spectrum is not positive", batch_index_, min_eigenvalue_)),
      batch_index(batch_index_),
      min_eigenvalue(min_eigenvalue_) {}

BatchedMatrix::BatchedMatrix(std::size_t batch_, std::size_t rows_, std::size_t cols_)
    : batch(batch_), rows(rows_), cols(cols_), data(batch_ * rows_ * cols_, 0.0) {}

BatchedMatrix::BatchedMatrix(std::size_t batch_, std::size_t rows_, std::size_t cols_,
                             std::vector<double> values)
    : batch(batch_), rows(rows_), cols(cols_), data(std::move(values)) {
    check_values_size(batch * rows * cols, data.size());
}

BatchedMatrix BatchedMatrix::identity(std::size_t batch, std::size_t n) {
    BatchedMatrix m(batch, n, n);
    for (std::size_t k = 0; k < batch; ++k)
        for (std::size_t i = 0; i < n; ++i) m(k, i, i) = 1.0;
    return m;
}

BatchedSymmetric::BatchedSymmetric(std::size_t batch_, std::size_t dim_)
    : batch(batch_), dim(dim_), data(batch_ * dim_ * dim_, 0.0) {}

BatchedSymmetric::BatchedSymmetric(std::size_t batch_, std::size_t dim_, std::vector<double> values)
    : batch(batch_), dim(dim_), data(std::move(values)) {
    check_values_size(batch * dim * dim, data.size());
}

BatchedSymmetric BatchedSymmetric::identity(std::size_t batch, std::size_t dim) {
    BatchedSymmetric a(batch, dim);
    for (std::size_t k = 0; k < batch; ++k)
        for (std::size_t i = 0; i < dim; ++i) a(k, i, i) = 1.0;
    return a;
}

BatchedSymmetric BatchedSymmetric::from_matrix(BatchedMatrix m) {
    if (m.rows != m.cols) {
        throw DimMismatch("symmetric batch requires square matrices, got " +
                          std::to_string(m.rows) + " x " + std::to_string(m.cols));
    }
    return BatchedSymmetric(m.batch, m.rows, std::move(m.data));
}

BatchedMatrix BatchedSymmetric::to_matrix() const { return BatchedMatrix(batch, dim, dim, data); }

TridiagonalBatch::TridiagonalBatch(std::size_t batch_, std::size_t dim_)
    : batch(batch_), dim(dim_), diag(batch_ * dim_, 0.0), offdiag(batch_ * (dim_ > 0 ? dim_ - 1 : 0), 0.0) {}

BatchedSymmetric TridiagonalBatch::densify() const {
    BatchedSymmetric out(batch, dim);
    for (std::size_t k = 0; k < batch; ++k) {
        auto d = diag_of(k);
        auto e = off_of(k);
        for (std::size_t i = 0; i < dim; ++i) out(k, i, i) = d[i];
        for (std::size_t i = 0; i + 1 < dim; ++i) {
            out(k, i + 1, i) = e[i];
            out(k, i, i + 1) = e[i];
        }
    }
    return out;
}

void SolverConfig::check(std::size_t dim) const {
    if (!(deflation_tol >= 0.0)) throw std::invalid_argument("deflation_tol must be nonnegative");
    if (max_double_steps && *max_double_steps == 0)
        throw std::invalid_argument("max_double_steps must be at least 1");
    if (!(symmetry_tol >= 0.0)) throw std::invalid_argument("symmetry_tol must be nonnegative");
    if (wy_block && *wy_block > 0) {
        const std::size_t limit = dim >= 2 ? dim - 2 : 0;
        if (*wy_block > limit) throw BlockTooLarge(*wy_block, limit);
    }
}

std::size_t SolverConfig::effective_max_double_steps(std::size_t dim) const {
    return max_double_steps ? *max_double_steps : std::max<std::size_t>(1, 2 * dim);
}

std::size_t SolverConfig::effective_wy_block(std::size_t dim) const {
    if (wy_block) return *wy_block;
    return dim < 16 ? 0 : 4;
}

double frobenius_norm(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

void check_finite(const BatchedMatrix& m) {
    for (std::size_t k = 0; k < m.batch; ++k) {
        auto values = m.matrix(k);
        for (std::size_t idx = 0; idx < values.size(); ++idx) {
            if (!std::isfinite(values[idx])) throw NonFinite(k, idx / m.cols, idx % m.cols);
        }
    }
}

BatchedSymmetric validate(const BatchedSymmetric& a, const SolverConfig& cfg) {
    if (a.dim == 0) throw DimMismatch("matrix dimension must be at least 1");
    if (a.data.size() != a.batch * a.dim * a.dim)
        throw DimMismatch("payload size does not match batch x dim x dim");

    BatchedSymmetric out = a;
    const std::size_t n = a.dim;
    for (std::size_t k = 0; k < a.batch; ++k) {
        auto m = out.matrix(k);
        for (std::size_t idx = 0; idx < m.size(); ++idx) {
            if (!std::isfinite(m[idx])) throw NonFinite(k, idx / n, idx % n);
        }
        const double limit = cfg.symmetry_tol * std::max(1.0, frobenius_norm(m));
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                worst = std::max(worst, std::abs(m[i * n + j] - m[j * n + i]));
        if (worst > limit) throw NonSymmetric(k, worst);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double mid = 0.5 * (m[i * n + j] + m[j * n + i]);
                m[i * n + j] = mid;
                m[j * n + i] = mid;
            }
        }
    }
    return out;
}

}  // namespace bed
