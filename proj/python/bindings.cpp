#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dci/analysis.hpp"
#include "dci/baselines.hpp"
#include "dci/bench.hpp"
#include "dci/dataset_io.hpp"
#include "dci/dci_index.hpp"
#include "dci/query.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

dci::Dataset to_dataset(const Array& points, std::optional<std::vector<dci::PointId>> ids) {
    if (points.ndim() != 2) throw std::invalid_argument("points must be a 2-D array (n, d)");
    const auto n = static_cast<std::size_t>(points.shape(0));
    const auto d = static_cast<std::size_t>(points.shape(1));
    if (ids && ids->size() != n) throw std::invalid_argument("ids must have one entry per point");
    dci::Dataset out(d);
    out.reserve(n);
    const double* base = points.data();
    for (std::size_t r = 0; r < n; ++r) {
        out.push_back(ids ? (*ids)[r] : r, std::span<const double>(base + r * d, d));
    }
    return out;
}

std::span<const double> to_span(const Array& v) {
    if (v.ndim() != 1) throw std::invalid_argument("expected a 1-D vector");
    return {v.data(), static_cast<std::size_t>(v.shape(0))};
}

Array to_array(const dci::Dataset& ds) {
    Array out({ds.size(), ds.dim()});
    std::copy(ds.coords().begin(), ds.coords().end(), out.mutable_data());
    return out;
}

py::list neighbours_list(const std::vector<dci::Neighbour>& nbs) {
    py::list out;
    for (const auto& nb : nbs) out.append(py::make_tuple(nb.id, nb.dist));
    return out;
}

py::dict report_dict(const dci::QueryReport& rep) {
    py::dict d;
    d["neighbours"] = neighbours_list(rep.neighbours);
    d["candidates"] = rep.unique_candidates;
    d["iterations"] = rep.outer_iterations;
    d["termination"] = std::string(dci::to_string(rep.termination));
    return d;
}

dci::QueryParams make_params(std::size_t k, std::optional<std::size_t> k_tilde, std::optional<double> epsilon) {
    if (k_tilde.has_value() == epsilon.has_value()) {
        throw std::invalid_argument("pass exactly one of k_tilde or epsilon");
    }
    dci::QueryParams p{k, dci::Adaptive{}};
    if (k_tilde) p.mode = dci::FixedIterations{*k_tilde};
    else p.mode = dci::Adaptive{*epsilon};
    return p;
}

}  // namespace

PYBIND11_MODULE(pydci, m) {
    m.doc() = "Dynamic continuous indexing for k-nearest-neighbour search";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const std::out_of_range& e) {
            PyErr_SetString(PyExc_KeyError, e.what());
        }
    });

    py::class_<dci::DciIndex>(m, "DciIndex")
        .def(py::init([](std::size_t m_, std::size_t L, std::uint64_t seed, std::size_t dim) {
                 return dci::DciIndex({m_, L}, seed, dim);
             }),
             py::arg("m") = 1, py::arg("L") = 1, py::arg("seed") = 0, py::arg("dim") = 0)
        .def_static(
            "construct",
            [](const Array& points, std::size_t m_, std::size_t L, std::uint64_t seed,
               std::optional<std::vector<dci::PointId>> ids) {
                return dci::DciIndex::construct(to_dataset(points, std::move(ids)), {m_, L}, seed);
            },
            py::arg("points"), py::arg("m") = 1, py::arg("L") = 1, py::arg("seed") = 0, py::arg("ids") = py::none())
        .def(
            "insert", [](dci::DciIndex& self, dci::PointId id, const Array& v) { self.insert(id, to_span(v)); },
            py::arg("id"), py::arg("coords"))
        .def("erase", &dci::DciIndex::erase, py::arg("id"))
        .def("__contains__", &dci::DciIndex::contains)
        .def("__len__", &dci::DciIndex::size)
        .def_property_readonly("dim", &dci::DciIndex::dim)
        .def_property_readonly("m", [](const dci::DciIndex& self) { return self.params().m; })
        .def_property_readonly("L", [](const dci::DciIndex& self) { return self.params().L; })
        .def_property_readonly("seed", &dci::DciIndex::seed)
        .def("ids", [](const dci::DciIndex& self) {
            return std::vector<dci::PointId>(self.ids().begin(), self.ids().end());
        })
        .def(
            "query",
            [](const dci::DciIndex& self, const Array& q, std::size_t k, std::optional<std::size_t> k_tilde,
               std::optional<double> epsilon) {
                return report_dict(dci::query(self, to_span(q), make_params(k, k_tilde, epsilon)));
            },
            py::arg("q"), py::arg("k"), py::kw_only(), py::arg("k_tilde") = py::none(),
            py::arg("epsilon") = py::none())
        .def(
            "save", [](const dci::DciIndex& self, const std::filesystem::path& p) { self.save(p); },
            py::arg("path"))
        .def_static(
            "load", [](const std::filesystem::path& p) { return dci::DciIndex::load(p); }, py::arg("path"))
        .def("to_bytes",
             [](const dci::DciIndex& self) {
                 std::ostringstream out;
                 self.save(out);
                 return py::bytes(out.str());
             })
        .def_static("from_bytes", [](const py::bytes& b) {
            std::istringstream in{std::string(b)};
            return dci::DciIndex::load(in);
        });

    m.def(
        "brute_force_knn",
        [](const Array& points, const Array& q, std::size_t k) {
            return neighbours_list(dci::brute_force_knn(to_dataset(points, std::nullopt), to_span(q), k));
        },
        py::arg("points"), py::arg("q"), py::arg("k"));

    py::class_<dci::LshIndex>(m, "LshIndex")
        .def(py::init([](const Array& points, std::size_t H, std::size_t T, double w, std::uint64_t seed) {
                 return dci::LshIndex(to_dataset(points, std::nullopt), {H, T, w}, seed);
             }),
             py::arg("points"), py::arg("H") = 24, py::arg("T") = 100, py::arg("w") = 1.0, py::arg("seed") = 0)
        .def(
            "query",
            [](const dci::LshIndex& self, const Array& q, std::size_t k) {
                const auto res = self.query(to_span(q), k);
                py::dict d;
                d["neighbours"] = neighbours_list(res.neighbours);
                d["candidates"] = res.unique_candidates;
                return d;
            },
            py::arg("q"), py::arg("k"))
        .def("bucket_count", &dci::LshIndex::bucket_count, py::arg("table"));

    m.def(
        "stopping_statistic",
        [](double kth, const std::vector<double>& maxes, std::size_t m_) {
            return dci::stopping_statistic(kth, maxes, m_);
        },
        py::arg("kth_dist"), py::arg("max_dists"), py::arg("m"));
    m.def(
        "stopping_test",
        [](double kth, const std::vector<double>& maxes, std::size_t m_, double eps) {
            return dci::stopping_test(kth, maxes, m_, eps);
        },
        py::arg("kth_dist"), py::arg("max_dists"), py::arg("m"), py::arg("epsilon"));
    m.def("suggest_k_tilde", &dci::suggest_k_tilde, py::arg("n"), py::arg("k"), py::arg("gamma"),
          py::arg("c") = 1.0);
    m.def("inversion_bound", &dci::inversion_bound, py::arg("short_len"), py::arg("long_len"));
    m.def(
        "monte_carlo_inversion_rate",
        [](const Array& vs, const Array& vl, std::size_t trials, std::uint64_t seed) {
            return dci::monte_carlo_inversion_rate(to_span(vs), to_span(vl), trials, seed);
        },
        py::arg("v_short"), py::arg("v_long"), py::arg("trials"), py::arg("seed") = 0);
    m.def(
        "estimate_global_sparsity",
        [](const Array& points, std::size_t tau) {
            const auto prof = dci::estimate_global_sparsity(to_dataset(points, std::nullopt), tau);
            py::dict d;
            d["tau"] = prof.tau;
            d["gamma"] = prof.gamma;
            d["intrinsic_dim"] = prof.intrinsic_dim;
            return d;
        },
        py::arg("points"), py::arg("tau"));
    m.def(
        "approximation_ratio",
        [](const std::vector<double>& approx_dists, const std::vector<double>& exact_dists) {
            std::vector<dci::Neighbour> a, e;
            for (double x : approx_dists) a.push_back({0, x});
            for (double x : exact_dists) e.push_back({0, x});
            return dci::approximation_ratio(a, e);
        },
        py::arg("approx_dists"), py::arg("exact_dists"));
    m.def(
        "synth_dataset",
        [](const std::string& kind, std::size_t n, std::size_t d, std::uint64_t seed, std::size_t clusters,
           double spread, double scale_ratio) {
            const auto k = dci::parse_synth_kind(kind);
            if (!k) throw std::invalid_argument("unknown kind '" + kind + "'");
            return to_array(dci::synth_dataset(*k, n, d, seed, {clusters, spread, scale_ratio}));
        },
        py::arg("kind"), py::arg("n"), py::arg("d"), py::arg("seed") = 0, py::arg("clusters") = 10,
        py::arg("spread") = 0.05, py::arg("scale_ratio") = 10.0);
    m.def(
        "load_dataset",
        [](const std::filesystem::path& path, const std::string& format, bool id_column) {
            const auto f = dci::parse_dataset_format(format);
            if (!f) throw std::invalid_argument("unknown format '" + format + "'");
            const auto ds = dci::load_dataset(path, *f, {id_column});
            return py::make_tuple(std::vector<dci::PointId>(ds.ids().begin(), ds.ids().end()), to_array(ds));
        },
        py::arg("path"), py::arg("format") = "csv", py::arg("id_column") = false);
    m.def(
        "run_bench",
        [](const std::filesystem::path& config_path) {
            const auto res = dci::run_bench(dci::load_bench_config(config_path));
            std::ostringstream csv;
            dci::write_curve_csv(csv, res.curve);
            return csv.str();
        },
        py::arg("config"), "Runs a key=value bench config and returns the curve CSV text.");
}
