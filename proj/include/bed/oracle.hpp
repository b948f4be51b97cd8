#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bed/solver.hpp"
#include "bed/tensor.hpp"

namespace bed::oracle {

// Eigenpairs of a single matrix. vectors is row-major n x n, column j pairs with values[j].
struct Eigensystem {
    std::vector<double> values;
    std::vector<double> vectors;
};

// Cyclic two-sided Jacobi rotations on a dense symmetric matrix (row-major n x n).
// Sweeps until the off-diagonal part has Frobenius norm at most tol * ||A||_F; NoConvergence
// after 100 sweeps. Values are returned unsorted (diagonal order).
Eigensystem jacobi_eig(std::span<const double> a, std::size_t n, double tol = 1e-12);

// Closed-form eigenvalues of a 2x2 (quadratic formula) or 3x3 (trigonometric
// Cardano) symmetric matrix, ascending.
std::vector<double> closed_form_eig(std::span<const double> a, std::size_t n);

// Determinant by Gaussian elimination with partial pivoting.
double determinant(std::span<const double> a, std::size_t n);

struct Tolerances {
    double eigenvalue = 1e-8;     // relative to max |lambda| of the reference
    double subspace_angle = 1e-6;  // radians
    double reconstruction = 1e-10;  // ||A - V L V^T||_F / ||A||_F
    double cluster_gap = 1e-8;     // relative gap below which eigenvalues form a cluster
};

struct OracleReport {
    double max_abs_eigenvalue_error = 0.0;
    double max_subspace_angle = 0.0;
    double reconstruction_residual = 0.0;
    bool pass = false;
};

// Largest |x_i - y_i| after sorting both sets ascending. Throws ShapeMismatch on
// different sizes.
double eigenvalue_error(std::span<const double> x, std::span<const double> y);

// Compares a solved batch against per-matrix reference eigensystems of the same
// inputs. Columns are paired through their eigenvalues; runs of eigenvalues closer
// than cluster_gap * max|lambda| are compared as subspaces. The angle and residual
// are 0 when the result carries no eigenvectors.
std::vector<OracleReport> compare(const BatchedSymmetric& a, const EigenResult& e,
                                  std::span<const Eigensystem> reference,
                                  const Tolerances& tol = {});

// Runs jacobi_eig on every matrix of a.
std::vector<Eigensystem> reference_solutions(const BatchedSymmetric& a, double tol = 1e-13);

}  // namespace bed::oracle
