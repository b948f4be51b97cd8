#include "bed/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bed/errors.hpp"
#include "bed/householder.hpp"
#include "bed/random.hpp"

namespace bed::bench {

const char* to_string(Mode m) { return m == Mode::values ? "values" : "full"; }

void BenchSpec::check() const {
    if (dims.empty() || batches.empty()) throw std::invalid_argument("bench: empty dims or batches");
    for (auto n : dims)
        if (n < 2) throw std::invalid_argument("bench: dims must be >= 2");
    for (auto b : batches)
        if (b < 1) throw std::invalid_argument("bench: batches must be >= 1");
    if (reps < 1) throw std::invalid_argument("bench: reps must be >= 1");
    if (!(condition_decades >= 0.0)) throw std::invalid_argument("bench: decades must be >= 0");
}

BatchedSymmetric gen_spd(std::size_t batch, std::size_t dim, std::uint64_t seed,
                         double condition_decades) {
    BatchedSymmetric out(batch, dim);
    std::vector<double> u(dim);
    std::vector<double> scratch(dim);
    for (std::size_t k = 0; k < batch; ++k) {
        Rng rng(Rng::derive(seed, k));
        auto m = out.matrix(k);
        const double base = std::pow(10.0, rng.uniform());
        if (condition_decades == 0.0) {
            for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = base;
            continue;
        }
        for (std::size_t i = 0; i < dim; ++i)
            m[i * dim + i] = base * std::pow(10.0, condition_decades * rng.uniform());
        for (std::size_t r = 0; r < dim; ++r) {
            double norm2 = 0.0;
            for (auto& x : u) {
                x = rng.normal();
                norm2 += x * x;
            }
            detail::apply_rank2(m, dim, u, norm2, scratch);
        }
    }
    return out;
}

std::string csv_line(const BenchRow& row) {
    std::ostringstream s;
    s.precision(17);
    s << row.dim << ',' << row.batch << ',' << to_string(row.mode) << ',' << row.median_wall_s << ','
      << row.per_matrix_s << ',' << row.mean_r << ',' << row.mean_k << ',' << row.rotations << ','
      << row.max_eig_err;
    return s.str();
}

namespace {

double lambda_max(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double max_relative_eig_err(const BatchedSymmetric& a, const EigenResult& e,
                            const std::vector<oracle::Eigensystem>& ref) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.batch; ++k) {
        const double scale = std::max(lambda_max(ref[k].values), 1e-300);
        worst = std::max(worst, oracle::eigenvalue_error(e.values_of(k), ref[k].values) / scale);
    }
    return worst;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
    spec.check();
    std::vector<BenchRow> rows;
    for (auto n : spec.dims) {
        for (auto b : spec.batches) {
            const BatchedSymmetric a = gen_spd(b, n, spec.seed, spec.condition_decades);
            SolverConfig cfg;
            cfg.compute_vectors = spec.mode == Mode::full;

            EigenResult last = batched_eig(a, cfg);
            std::vector<double> times;
            for (std::size_t r = 0; r < spec.reps; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                last = batched_eig(a, cfg);
                const auto t1 = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(t1 - t0).count());
            }

            BenchRow row;
            row.dim = n;
            row.batch = b;
            row.mode = spec.mode;
            row.median_wall_s = median(times);
            row.per_matrix_s = row.median_wall_s / static_cast<double>(b);
            row.mean_r = last.diagnostics.mean_reduction;
            row.mean_k = static_cast<double>(last.diagnostics.double_steps);
            row.rotations = last.diagnostics.rotation_count;
            row.max_eig_err = max_relative_eig_err(a, last, oracle::reference_solutions(a));
            rows.push_back(row);
        }
    }
    return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("loglog_slope: need at least two rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.dim));
        const double y = std::log(r.per_matrix_s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(rows.size());
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("loglog_slope: rows share a single dimension");
    return (m * sxy - sx * sy) / den;
}

double orthogonality_error(std::span<const double> v, std::size_t n) {
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += v[i * n + a] * v[i * n + b];
            const double d = s - (a == b ? 1.0 : 0.0);
            sum += d * d;
        }
    return std::sqrt(sum);
}

VerifyReport run_verify(const BenchSpec& spec, const VerifyOptions& opts, std::ostream& out) {
    spec.check();
    VerifyReport report;
    oracle::Tolerances otol;
    otol.eigenvalue = opts.tol.eigenvalue;
    otol.reconstruction = opts.tol.reconstruction;

    out << "dim batch max_eig_err max_recon max_orth max_batch_gap k mean_r rotations status\n";
    std::map<std::size_t, std::vector<double>> r_by_dim;

    for (auto n : spec.dims) {
        for (auto b : spec.batches) {
            VerifyCell cell;
            cell.dim = n;
            cell.batch = b;
            auto fail = [&](std::size_t index, std::string reason) {
                cell.pass = false;
                report.failures.push_back({n, b, index, std::move(reason)});
            };

            const BatchedSymmetric a = opts.identity_input
                                           ? BatchedSymmetric::identity(b, n)
                                           : gen_spd(b, n, spec.seed, spec.condition_decades);
            SolverConfig cfg;
            cfg.compute_vectors = spec.mode == Mode::full;
            if (opts.deflation_tol) cfg.deflation_tol = *opts.deflation_tol;

            EigenResult e;
            try {
                e = batched_eig(a, cfg);
            } catch (const NoConvergence& err) {
                cell.converged = false;
                for (auto idx : err.batch_indices) fail(idx, err.what());
                report.cells.push_back(cell);
                out << n << ' ' << b << " - - - - - - - FAIL (no convergence)\n";
                continue;
            }
            if (opts.inject_fault && b > 0 && n > 0) e.eigenvalues[0] = -e.eigenvalues[0];

            cell.double_steps = e.diagnostics.double_steps;
            cell.mean_r = e.diagnostics.mean_reduction;
            cell.rotations = e.diagnostics.rotation_count;

            const auto ref = oracle::reference_solutions(a);
            const auto reports = oracle::compare(a, e, ref, otol);
            for (std::size_t k = 0; k < b; ++k) {
                const double scale = std::max(lambda_max(ref[k].values), 1e-300);
                const double rel = reports[k].max_abs_eigenvalue_error / scale;
                cell.max_eig_err = std::max(cell.max_eig_err, rel);
                if (rel > opts.tol.eigenvalue) fail(k, "eigenvalue error " + std::to_string(rel));
                if (e.eigenvectors) {
                    const double rec = reports[k].reconstruction_residual;
                    cell.max_reconstruction = std::max(cell.max_reconstruction, rec);
                    if (rec > opts.tol.reconstruction) fail(k, "reconstruction " + std::to_string(rec));
                    const double orth = orthogonality_error(e.eigenvectors->matrix(k), n);
                    cell.max_orthogonality = std::max(cell.max_orthogonality, orth);
                    if (orth > opts.tol.orthogonality * static_cast<double>(n))
                        fail(k, "orthogonality " + std::to_string(orth));
                }
            }

            // Each matrix solved on its own must match its slot in the batched solve.
            for (std::size_t k = 0; k < b; ++k) {
                BatchedSymmetric single(1, n);
                auto src = a.matrix(k);
                std::copy(src.begin(), src.end(), single.data.begin());
                SolverConfig scfg;
                scfg.compute_vectors = false;
                scfg.deflation_tol = cfg.deflation_tol;
                try {
                    const EigenResult s = batched_eig(single, scfg);
                    r_by_dim[n].push_back(s.diagnostics.mean_reduction);
                    if (b > 1) {
                        const double scale = std::max(lambda_max(ref[k].values), 1e-300);
                        const double gap = oracle::eigenvalue_error(s.values_of(0), e.values_of(k)) / scale;
                        cell.max_batch_gap = std::max(cell.max_batch_gap, gap);
                        if (gap > opts.tol.batch_consistency)
                            fail(k, "batch vs single gap " + std::to_string(gap));
                    }
                } catch (const NoConvergence& err) {
                    fail(k, std::string("single solve: ") + err.what());
                }
            }

            std::ostringstream line;
            line.precision(3);
            line << std::scientific << n << ' ' << b << ' ' << cell.max_eig_err << ' '
                 << cell.max_reconstruction << ' ' << cell.max_orthogonality << ' '
                 << cell.max_batch_gap << ' ' << std::defaultfloat << cell.double_steps << ' '
                 << cell.mean_r << ' ' << cell.rotations << ' ' << (cell.pass ? "PASS" : "FAIL");
            out << line.str() << '\n';
            report.cells.push_back(cell);
        }
    }

    out << "reduction distribution (single-matrix solves, r rounded down):\n";
    for (auto& [n, rs] : r_by_dim) {
        std::map<long, std::size_t> hist;
        for (double r : rs) ++hist[static_cast<long>(std::floor(r))];
        out << "  n=" << n << " median=" << median(rs) << " :";
        for (auto [bucket, count] : hist) out << ' ' << bucket << 'x' << count;
        out << '\n';
    }

    for (const auto& f : report.failures)
        out << "failure: dim=" << f.dim << " batch=" << f.batch << " index=" << f.index << " "
            << f.reason << '\n';
    out << (report.pass() ? "verify: PASS" : "verify: FAIL") << '\n';
    return report;
}

}  // namespace bed::bench
