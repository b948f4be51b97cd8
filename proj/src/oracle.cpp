#include "bed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace bed::oracle {

Eigensystem jacobi_eig(std::span<const double> a_in, std::size_t n, double tol) {
    if (n == 0 || a_in.size() != n * n) throw ShapeMismatch("jacobi_eig: expected an n x n matrix");
    std::vector<double> a(a_in.begin(), a_in.end());
    Eigensystem out{std::vector<double>(n), std::vector<double>(n * n, 0.0)};
    auto& v = out.vectors;
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double norm = frobenius_norm(a);
    const double threshold = tol * norm;
    constexpr int kMaxSweeps = 100;
    bool converged = norm == 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double off2 = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off2 += 2.0 * a[p * n + q] * a[p * n + q];
        if (std::sqrt(off2) <= threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::hypot(theta, 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                // A <- J^T A J with J = [[c, s], [-s, c]] on the (p, q) plane.
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a[p * n + q]));
        if (off > threshold) throw NoConvergence({0}, off, kMaxSweeps);
    }
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
    return out;
}

std::vector<double> closed_form_eig(std::span<const double> a, std::size_t n) {
    if (a.size() != n * n) throw ShapeMismatch("closed_form_eig: expected an n x n matrix");
    if (n == 2) {
        const double mid = 0.5 * (a[0] + a[3]);
        const double rad = std::hypot(0.5 * (a[0] - a[3]), a[1]);
        return {mid - rad, mid + rad};
    }
    if (n != 3) throw ShapeMismatch("closed_form_eig supports 2x2 and 3x3 only");

    const double a00 = a[0], a11 = a[4], a22 = a[8];
    const double a01 = a[1], a02 = a[2], a12 = a[5];
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    if (p1 == 0.0) {
        std::vector<double> d{a00, a11, a22};
        std::sort(d.begin(), d.end());
        return d;
    }
    const double q = (a00 + a11 + a22) / 3.0;
    const double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const double b00 = (a00 - q) / p, b11 = (a11 - q) / p, b22 = (a22 - q) / p;
    const double b01 = a01 / p, b02 = a02 / p, b12 = a12 / p;
    const double det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                         b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double mid = 3.0 * q - hi - lo;
    std::vector<double> out{lo, mid, hi};
    std::sort(out.begin(), out.end());
    return out;
}

double determinant(std::span<const double> a_in, std::size_t n) {
    std::vector<double> a(a_in.begin(), a_in.end());
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (a[pivot * n + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
            det = -det;
        }
        const double d = a[col * n + col];
        det *= d;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
        }
    }
    return det;
}

double eigenvalue_error(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeMismatch("eigenvalue sets differ in size");
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(xs[i] - ys[i]));
    return worst;
}

namespace {

std::vector<std::size_t> ascending_order(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return values[i] < values[j]; });
    return idx;
}

// Largest principal angle between span(V[:, cols_v]) and span(W[:, cols_w]), both
// orthonormal column sets of n-vectors.
double subspace_angle(std::span<const double> v, std::span<const std::size_t> cols_v,
                      std::span<const double> w, std::span<const std::size_t> cols_w, std::size_t n) {
    const std::size_t m = cols_v.size();
    // R = V_c - W_c (W_c^T V_c); sin(theta_max) = ||R||_2.
    std::vector<double> proj(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += w[i * n + cols_w[a]] * v[i * n + cols_v[b]];
            proj[a * m + b] = s;
        }
    std::vector<double> r(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < m; ++b) {
            double s = v[i * n + cols_v[b]];
            for (std::size_t a = 0; a < m; ++a) s -= w[i * n + cols_w[a]] * proj[a * m + b];
            r[i * m + b] = s;
        }
    std::vector<double> gram(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += r[i * m + a] * r[i * m + b];
            gram[a * m + b] = s;
        }
    double largest = 0.0;
    if (m == 1) {
        largest = gram[0];
    } else {
        const Eigensystem g = jacobi_eig(gram, m, 1e-15);
        largest = *std::max_element(g.values.begin(), g.values.end());
    }
    return std::asin(std::min(1.0, std::sqrt(std::max(0.0, largest))));
}

double reconstruction_residual(std::span<const double> a, std::span<const double> values,
                               std::span<const double> v, std::size_t n) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += v[i * n + c] * values[c] * v[j * n + c];
            const double d = a[i * n + j] - s;
            num += d * d;
        }
    const double norm = frobenius_norm(a);
    return norm > 0.0 ? std::sqrt(num) / norm : std::sqrt(num);
}

}  // namespace

std::vector<OracleReport> compare(const BatchedSymmetric& a, const EigenResult& e,
                                  std::span<const Eigensystem> reference, const Tolerances& tol) {
    const std::size_t n = a.dim;
    if (e.batch != a.batch || e.dim != n || reference.size() != a.batch)
        throw ShapeMismatch("compare: batch or dimension mismatch");
    std::vector<OracleReport> reports(a.batch);
    for (std::size_t k = 0; k < a.batch; ++k) {
        const Eigensystem& ref = reference[k];
        if (ref.values.size() != n || ref.vectors.size() != n * n)
            throw ShapeMismatch("compare: reference has the wrong dimension");
        OracleReport& rep = reports[k];
        auto values = e.values_of(k);
        rep.max_abs_eigenvalue_error = eigenvalue_error(values, ref.values);

        double scale = 0.0;
        for (double x : ref.values) scale = std::max(scale, std::abs(x));
        bool ok = rep.max_abs_eigenvalue_error <= tol.eigenvalue * std::max(scale, 1e-300);

        if (e.eigenvectors) {
            auto v = e.eigenvectors->matrix(k);
            const auto order_e = ascending_order(values);
            const auto order_r = ascending_order(ref.values);
            std::size_t begin = 0;
            while (begin < n) {
                std::size_t end = begin + 1;
                while (end < n && ref.values[order_r[end]] - ref.values[order_r[end - 1]] <
                                      tol.cluster_gap * scale)
                    ++end;
                const double angle =
                    subspace_angle(v, std::span(order_e).subspan(begin, end - begin), ref.vectors,
                                   std::span(order_r).subspan(begin, end - begin), n);
                rep.max_subspace_angle = std::max(rep.max_subspace_angle, angle);
                begin = end;
            }
            rep.reconstruction_residual = reconstruction_residual(a.matrix(k), values, v, n);
            ok = ok && rep.max_subspace_angle <= tol.subspace_angle &&
                 rep.reconstruction_residual <= tol.reconstruction;
        }
        rep.pass = ok;
    }
    return reports;
}

std::vector<Eigensystem> reference_solutions(const BatchedSymmetric& a, double tol) {
    std::vector<Eigensystem> out;
    out.reserve(a.batch);
    for (std::size_t k = 0; k < a.batch; ++k) out.push_back(jacobi_eig(a.matrix(k), a.dim, tol));
    return out;
}

}  // namespace bed::oracle
