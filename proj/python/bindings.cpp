#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "bed/bed_io.hpp"
#include "bed/bench.hpp"
#include "bed/errors.hpp"
#include "bed/householder.hpp"
#include "bed/oracle.hpp"
#include "bed/solver.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Accepts (n, n) or (batch, n, n); reports whether the batch axis was added.
bed::BatchedSymmetric to_symmetric(const Array& a, bool& squeezed) {
    squeezed = a.ndim() == 2;
    if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("expected an (n, n) or (batch, n, n) array");
    const auto b = squeezed ? 1 : a.shape(0);
    const auto r = a.shape(a.ndim() - 2);
    const auto c = a.shape(a.ndim() - 1);
    if (r != c) throw py::value_error("matrices must be square");
    std::vector<double> data(a.data(), a.data() + a.size());
    return {static_cast<std::size_t>(b), static_cast<std::size_t>(r), std::move(data)};
}

bed::BatchedMatrix to_matrix(const Array& a) {
    if (a.ndim() != 3) throw py::value_error("expected a (batch, rows, cols) array");
    std::vector<double> data(a.data(), a.data() + a.size());
    return {static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
            static_cast<std::size_t>(a.shape(2)), std::move(data)};
}

py::array_t<double> to_array(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
    py::array_t<double> out(shape);
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<double> to_array(const bed::BatchedMatrix& m, bool squeeze) {
    if (squeeze) return to_array(m.data, {static_cast<py::ssize_t>(m.rows), static_cast<py::ssize_t>(m.cols)});
    return to_array(m.data, {static_cast<py::ssize_t>(m.batch), static_cast<py::ssize_t>(m.rows),
                             static_cast<py::ssize_t>(m.cols)});
}

bed::SortOrder parse_sort(const std::string& s) {
    if (s == "descending") return bed::SortOrder::descending;
    if (s == "ascending") return bed::SortOrder::ascending;
    if (s == "none") return bed::SortOrder::none;
    throw py::value_error("sort must be 'descending', 'ascending' or 'none'");
}

bed::SolverConfig make_config(bool compute_vectors, double deflation_tol, std::optional<std::size_t> max_steps,
                              const std::string& sort) {
    bed::SolverConfig cfg;
    cfg.compute_vectors = compute_vectors;
    cfg.deflation_tol = deflation_tol;
    cfg.max_double_steps = max_steps;
    cfg.sort = parse_sort(sort);
    return cfg;
}

py::dict diagnostics(const bed::Diagnostics& d) {
    py::dict out;
    out["double_steps"] = d.double_steps;
    out["reductions"] = d.reductions;
    out["mean_reduction"] = d.mean_reduction;
    out["rotation_count"] = d.rotation_count;
    out["sweeps"] = d.sweeps;
    return out;
}

py::tuple eig(const Array& a, bool compute_vectors, double deflation_tol, std::optional<std::size_t> max_steps,
              const std::string& sort) {
    bool squeeze = false;
    const auto sym = to_symmetric(a, squeeze);
    const auto cfg = make_config(compute_vectors, deflation_tol, max_steps, sort);
    bed::EigenResult e;
    {
        py::gil_scoped_release release;
        e = bed::batched_eig(sym, cfg);
    }
    const auto n = static_cast<py::ssize_t>(e.dim);
    py::object values = squeeze ? to_array(e.eigenvalues, {n})
                                : to_array(e.eigenvalues, {static_cast<py::ssize_t>(e.batch), n});
    py::object vectors = py::none();
    if (e.eigenvectors) vectors = to_array(*e.eigenvectors, squeeze);
    return py::make_tuple(values, vectors, diagnostics(e.diagnostics));
}

py::array_t<double> matrix_power(const Array& a, double p, std::optional<double> floor, double deflation_tol) {
    bool squeeze = false;
    const auto sym = to_symmetric(a, squeeze);
    bed::SolverConfig cfg;
    cfg.deflation_tol = deflation_tol;
    bed::BatchedMatrix out;
    {
        py::gil_scoped_release release;
        out = bed::matrix_power(bed::batched_eig(sym, cfg), p, floor);
    }
    return to_array(out, squeeze);
}

py::tuple tridiagonalize(const Array& a) {
    bool squeeze = false;
    const auto sym = bed::validate(to_symmetric(a, squeeze));
    auto [t, r] = bed::tridiagonalize(sym);
    const auto b = static_cast<py::ssize_t>(t.batch);
    const auto n = static_cast<py::ssize_t>(t.dim);
    return py::make_tuple(to_array(t.diag, {b, n}), to_array(t.offdiag, {b, static_cast<py::ssize_t>(t.off_size())}),
                          to_array(*t.transform, false));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Batched symmetric eigendecomposition (Householder tridiagonalization + shifted QR)";

    auto base = py::register_exception<bed::Error>(m, "BedError", PyExc_RuntimeError);
    py::register_exception<bed::NonSymmetric>(m, "NonSymmetric", base.ptr());
    py::register_exception<bed::NonFinite>(m, "NonFinite", base.ptr());
    py::register_exception<bed::IoError>(m, "IoError", base.ptr());
    py::register_exception<bed::BadMagic>(m, "BadMagic", base.ptr());
    py::register_exception<bed::TruncatedPayload>(m, "TruncatedPayload", base.ptr());
    py::register_exception<bed::DimMismatch>(m, "DimMismatch", base.ptr());
    py::register_exception<bed::BlockTooLarge>(m, "BlockTooLarge", base.ptr());
    py::register_exception<bed::NoConvergence>(m, "NoConvergence", base.ptr());
    py::register_exception<bed::NonPositiveSpectrum>(m, "NonPositiveSpectrum", base.ptr());
    py::register_exception<bed::ShapeMismatch>(m, "ShapeMismatch", base.ptr());

    m.def("eig", &eig, py::arg("a"), py::arg("compute_vectors") = true, py::arg("deflation_tol") = 1e-5,
          py::arg("max_double_steps") = py::none(), py::arg("sort") = "descending",
          "Eigenvalues, eigenvectors (None without vectors) and a diagnostics dict.");
    m.def("tridiagonalize", &tridiagonalize, py::arg("a"), "Diagonal, sub-diagonal and transform P.");
    m.def("matrix_power", &matrix_power, py::arg("a"), py::arg("p"), py::arg("floor") = py::none(),
          py::arg("deflation_tol") = 1e-5);
    m.def(
        "zca_whiten",
        [](const Array& x, double eps) {
            const auto xm = to_matrix(x);
            bed::BatchedMatrix out;
            {
                py::gil_scoped_release release;
                out = bed::zca_whiten(xm, eps);
            }
            return to_array(out, false);
        },
        py::arg("x"), py::arg("eps_reg"));
    m.def(
        "gen_spd",
        [](std::size_t batch, std::size_t dim, std::uint64_t seed, double decades) {
            return to_array(bed::bench::gen_spd(batch, dim, seed, decades).to_matrix(), false);
        },
        py::arg("batch"), py::arg("dim"), py::arg("seed") = 42, py::arg("condition_decades") = 3.0);
    m.def(
        "jacobi_eig",
        [](const Array& a, double tol) {
            bool squeeze = false;
            const auto sym = to_symmetric(a, squeeze);
            if (sym.batch != 1 || !squeeze) throw py::value_error("jacobi_eig takes a single (n, n) matrix");
            const auto e = bed::oracle::jacobi_eig(sym.matrix(0), sym.dim, tol);
            const auto n = static_cast<py::ssize_t>(sym.dim);
            return py::make_tuple(to_array(e.values, {n}), to_array(e.vectors, {n, n}));
        },
        py::arg("a"), py::arg("tol") = 1e-12);
    m.def(
        "load_bed", [](const std::string& path) { return to_array(bed::load_matrix_batch(path), false); },
        py::arg("path"));
    m.def(
        "save_bed", [](const Array& a, const std::string& path) { bed::save_matrix_batch(to_matrix(a), path); },
        py::arg("a"), py::arg("path"));
}
