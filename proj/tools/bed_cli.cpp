// bed: generate, solve, verify and benchmark batched symmetric eigenproblems.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "bed/bed_io.hpp"
#include "bed/bench.hpp"
#include "bed/errors.hpp"
#include "bed/solver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

struct GridFlags {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> batches;
    std::size_t reps = 5;
    std::uint64_t seed = 42;
    std::string mode = "full";
    double decades = 3.0;
};

void add_grid(CLI::App* cmd, GridFlags& g, bool with_reps) {
    cmd->add_option("--dims", g.dims, "Matrix dimensions, comma separated")->delimiter(',');
    cmd->add_option("--batches", g.batches, "Batch sizes, comma separated")->delimiter(',');
    if (with_reps) cmd->add_option("--reps", g.reps, "Timed repetitions per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", g.seed, "Generator seed");
    cmd->add_option("--mode", g.mode, "values or full")->check(CLI::IsMember({"values", "full"}));
    cmd->add_option("--decades", g.decades, "Spread of generated spectra in decades")
        ->check(CLI::NonNegativeNumber);
}

bed::bench::BenchSpec to_spec(const GridFlags& g, std::vector<std::size_t> default_dims) {
    bed::bench::BenchSpec spec;
    spec.dims = g.dims.empty() ? std::move(default_dims) : g.dims;
    if (!g.batches.empty()) spec.batches = g.batches;
    spec.reps = g.reps;
    spec.seed = g.seed;
    spec.mode = g.mode == "values" ? bed::bench::Mode::values : bed::bench::Mode::full;
    spec.condition_decades = g.decades;
    spec.check();
    return spec;
}

int cmd_gen(const GridFlags& g, const std::string& out) {
    if (g.dims.size() != 1 || g.batches.size() != 1) {
        std::cerr << "gen: give exactly one --dims and one --batches value\n";
        return kUsage;
    }
    const auto a = bed::bench::gen_spd(g.batches[0], g.dims[0], g.seed, g.decades);
    bed::save_matrix_batch(a.to_matrix(), out);
    return kOk;
}

int cmd_solve(const std::string& input, const std::string& prefix, bool no_vectors,
              std::optional<double> tol) {
    const bed::BatchedMatrix m = bed::load_matrix_batch(input);
    const auto a = bed::BatchedSymmetric::from_matrix(m);
    bed::SolverConfig cfg;
    cfg.compute_vectors = !no_vectors;
    if (tol) cfg.deflation_tol = *tol;
    const bed::EigenResult e = bed::batched_eig(a, cfg);

    bed::save_matrix_batch(bed::BatchedMatrix(e.batch, e.dim, 1, e.eigenvalues),
                           prefix + ".eigenvalues.bed");
    if (e.eigenvectors) bed::save_matrix_batch(*e.eigenvectors, prefix + ".eigenvectors.bed");

    const auto& d = e.diagnostics;
    std::cerr << "k=" << d.double_steps << " r=" << d.mean_reduction
              << " reductions=" << d.reductions << " rotations=" << d.rotation_count << '\n';
    return kOk;
}

int cmd_verify(const GridFlags& g, std::optional<double> tol, std::optional<double> deflation_tol,
               bool identity, bool inject_fault) {
    auto spec = to_spec(g, {4, 8, 12, 16, 20, 24, 28, 32});
    bed::bench::VerifyOptions opts;
    if (tol) opts.tol.eigenvalue = *tol;
    opts.identity_input = identity;
    opts.inject_fault = inject_fault;
    opts.deflation_tol = deflation_tol;
    const auto report = bed::bench::run_verify(spec, opts, std::cout);
    return report.pass() ? kOk : kFailed;
}

int cmd_bench(const GridFlags& g, const std::string& csv_path) {
    const auto spec = to_spec(g, {4, 8, 16, 32});
    const auto rows = bed::bench::run_bench(spec);

    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) throw bed::IoError("cannot open " + csv_path + " for writing");
        csv << bed::bench::kCsvHeader << '\n';
    }
    std::cout << bed::bench::kCsvHeader << '\n';
    for (const auto& row : rows) {
        const auto line = bed::bench::csv_line(row);
        std::cout << line << '\n';
        if (csv) csv << line << '\n';
    }

    if (spec.mode != bed::bench::Mode::values) return kOk;
    // Scaling self-check over n in {8, 16, 32} for every batch size of at least 64.
    std::map<std::size_t, std::vector<bed::bench::BenchRow>> by_batch;
    for (const auto& row : rows)
        if (row.batch >= 64 && (row.dim == 8 || row.dim == 16 || row.dim == 32))
            by_batch[row.batch].push_back(row);
    bool ok = true;
    for (const auto& [batch, cell] : by_batch) {
        if (cell.size() != 3) continue;
        const double slope = bed::bench::loglog_slope(cell);
        const bool in_window = slope >= 2.0 && slope <= 3.8;
        std::cerr << "scaling self-check batch=" << batch << " slope=" << slope
                  << (in_window ? " PASS" : " FAIL") << '\n';
        ok = ok && in_window;
    }
    return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batched symmetric eigendecomposition tool"};
    app.require_subcommand(1);

    GridFlags gen_flags, verify_flags, bench_flags;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Write a random SPD batch as a BED1 file");
    add_grid(gen, gen_flags, false);
    gen->add_option("--out", gen_out, "Output file")->required();

    std::string solve_in, solve_prefix;
    bool no_vectors = false;
    std::optional<double> solve_tol;
    auto* solve = app.add_subcommand("solve", "Eigendecompose a BED1 batch");
    solve->add_option("input", solve_in, "Input BED1 file")->required();
    solve->add_option("--out", solve_prefix, "Output prefix")->required();
    solve->add_flag("--no-vectors", no_vectors, "Skip eigenvectors");
    solve->add_option("--tol", solve_tol, "Deflation threshold")->check(CLI::NonNegativeNumber);

    std::optional<double> verify_tol, verify_deflation;
    bool identity = false, inject_fault = false;
    auto* verify = app.add_subcommand("verify", "Run the invariant suite over a grid");
    add_grid(verify, verify_flags, false);
    verify->add_option("--tol", verify_tol, "Eigenvalue tolerance relative to lambda_max");
    verify->add_option("--deflation-tol", verify_deflation, "Solver deflation threshold")
        ->check(CLI::NonNegativeNumber);
    verify->add_flag("--identity", identity, "Use identity matrices as input");
    verify->add_flag("--inject-fault", inject_fault, "Corrupt one eigenvalue to test the harness");

    std::string csv_path;
    auto* bench = app.add_subcommand("bench", "Time the solver over a grid and print CSV");
    add_grid(bench, bench_flags, true);
    bench->add_option("--csv", csv_path, "Also write the CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(gen_flags, gen_out);
        if (*solve) return cmd_solve(solve_in, solve_prefix, no_vectors, solve_tol);
        if (*verify) return cmd_verify(verify_flags, verify_tol, verify_deflation, identity, inject_fault);
        if (*bench) return cmd_bench(bench_flags, csv_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const bed::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bed::BadMagic& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bed::TruncatedPayload& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bed::DimMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bed::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
