// Python bindings: run specs, sweeps, benches and a few estimators.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leakscope/errors.hpp"
#include "leakscope/estimators.hpp"
#include "leakscope/pipeline.hpp"

namespace py = pybind11;
using namespace leakscope;

namespace {

std::optional<std::string> method_name(const RunSpec& s) {
    if (!s.method) return std::nullopt;
    return std::string(to_string(*s.method));
}

void set_method(RunSpec& s, const std::optional<std::string>& name) {
    if (!name) {
        s.method.reset();
        return;
    }
    try {
        s.method = parse_method(*name);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_leakscope, m) {
    m.doc() = "Probabilistic privacy-risk analysis of data-processing programs";
    m.attr("__version__") = kToolVersion;

    static py::exception<Error> base(m, "LeakscopeError");
    static py::exception<UsageError> usage(m, "UsageError", base.ptr());
    static py::exception<InferenceError> inference(m, "InferenceError", base.ptr());
    static py::exception<IoError> io(m, "IoError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UsageError& e) {
            py::set_error(usage, e.what());
        } catch (const InferenceError& e) {
            py::set_error(inference, e.what());
        } catch (const SamplingError& e) {
            py::set_error(inference, e.what());
        } catch (const IoError& e) {
            py::set_error(io, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<RunSpec>(m, "RunSpec")
        .def(py::init<>())
        .def_readwrite("scenario", &RunSpec::scenario)
        .def_property("method", &method_name, &set_method)
        .def_readwrite("samples", &RunSpec::samples)
        .def_readwrite("seed", &RunSpec::seed)
        .def_readwrite("chains", &RunSpec::chains)
        .def_readwrite("burn_in", &RunSpec::burn_in)
        .def_readwrite("epsilon", &RunSpec::epsilon)
        .def_readwrite("sensitivity", &RunSpec::sensitivity)
        .def_readwrite("k", &RunSpec::k)
        .def_readwrite("size", &RunSpec::size)
        .def_readwrite("names", &RunSpec::names)
        .def_readwrite("zips", &RunSpec::zips)
        .def_readwrite("days", &RunSpec::days)
        .def_readwrite("ill_prob", &RunSpec::ill_prob)
        .def_readwrite("sigma_s", &RunSpec::sigma_s)
        .def_readwrite("sigma_p", &RunSpec::sigma_p)
        .def_readwrite("n", &RunSpec::n)
        .def_readwrite("c", &RunSpec::c)
        .def_readwrite("observe", &RunSpec::observe)
        .def_readwrite("measures", &RunSpec::measures)
        .def_readwrite("out", &RunSpec::out)
        .def_readwrite("samples_out", &RunSpec::samples_out)
        .def("__eq__", [](const RunSpec& a, const RunSpec& b) { return a == b; });

    m.def("scenario_names", &scenario_names, "Names accepted by RunSpec.scenario.");

    m.def(
        "run_json",
        [](const RunSpec& spec) {
            py::gil_scoped_release release;
            return to_json(run(spec));
        },
        py::arg("spec"), "Run a spec and return the results document as JSON text.");

    m.def(
        "sweep",
        [](const RunSpec& spec, const std::vector<std::size_t>& grid, int repeats, std::optional<double> oracle) {
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = sweep(spec, grid, repeats, oracle);
            }
            py::list out;
            for (const auto& r : rows)
                out.append(py::dict(py::arg("n") = r.n, py::arg("mean_abs_err") = r.mean_abs_err,
                                    py::arg("min") = r.min, py::arg("max") = r.max));
            return out;
        },
        py::arg("spec"), py::arg("grid"), py::arg("repeats") = 5, py::arg("oracle") = py::none());

    m.def(
        "bench",
        [](const RunSpec& spec, const std::vector<std::int64_t>& sizes) {
            std::vector<BenchRow> rows;
            {
                py::gil_scoped_release release;
                rows = bench(spec, sizes);
            }
            py::list out;
            for (const auto& r : rows)
                out.append(py::dict(py::arg("size") = r.size, py::arg("seconds") = r.seconds,
                                    py::arg("payload_seconds") = r.payload_seconds));
            return out;
        },
        py::arg("spec"), py::arg("sizes"));

    m.def(
        "dump_samples",
        [](const RunSpec& spec, const std::string& path) {
            py::gil_scoped_release release;
            dump_samples(spec, path);
        },
        py::arg("spec"), py::arg("path"));

    m.def("knn_entropy_bits", &knn_entropy_bits, py::arg("xs"), py::arg("k") = 4,
          "Kozachenko-Leonenko differential entropy in bits.");
    m.def("knn_kl_bits", &knn_kl_bits, py::arg("p"), py::arg("q"), py::arg("k") = 4,
          "Nearest-neighbour KL divergence estimate in bits.");
    m.def("ksg_mi_bits", &ksg_mi_bits, py::arg("x"), py::arg("y"), py::arg("k") = 3,
          "Kraskov-Stoegbauer-Grassberger mutual information in bits.");
}
