#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bed {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonSymmetric : public Error {
public:
    NonSymmetric(std::size_t batch_index, double max_asymmetry);
    std::size_t batch_index;
    double max_asymmetry;
};

class NonFinite : public Error {
public:
    NonFinite(std::size_t batch_index, std::size_t row, std::size_t col);
    std::size_t batch_index;
    std::size_t row;
    std::size_t col;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// BED1 stream errors.
class BadMagic : public Error {
public:
    using Error::Error;
};

class TruncatedPayload : public Error {
public:
    using Error::Error;
};

class DimMismatch : public Error {
public:
    using Error::Error;
};

class BlockTooLarge : public Error {
public:
    BlockTooLarge(std::size_t block, std::size_t limit);
    std::size_t block;
    std::size_t limit;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::vector<std::size_t> batch_indices, double residual_offdiag_max,
                  std::size_t double_steps);
    std::vector<std::size_t> batch_indices;
    double residual_offdiag_max;
    std::size_t double_steps;
};

class NonPositiveSpectrum : public Error {
public:
    NonPositiveSpectrum(std::size_t batch_index, double min_eigenvalue);
    std::size_t batch_index;
    double min_eigenvalue;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace bed
