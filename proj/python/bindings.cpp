#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <sstream>

#include "sic/complexity.hpp"
#include "sic/errors.hpp"
#include "sic/harness.hpp"
#include "sic/linalg.hpp"
#include "sic/loss.hpp"
#include "sic/model.hpp"
#include "sic/optim.hpp"
#include "sic/testbench.hpp"

namespace py = pybind11;
using namespace sic;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

ComplexVector to_vector(const CArray& a) {
    if (a.ndim() != 1) throw UsageError("expected a 1-D complex array");
    return ComplexVector(a.data(), a.data() + a.size());
}

CArray to_array(const ComplexVector& v) {
    CArray out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(cplx));
    return out;
}

CArray to_array(const ComplexMatrix& m) {
    CArray out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(cplx));
    return out;
}

HermitianMatrix to_hermitian(const CArray& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw UsageError("expected a square 2-D complex array");
    const auto k = static_cast<std::size_t>(a.shape(0));
    return HermitianMatrix::from_dense(k, std::span<const cplx>(a.data(), k * k));
}

HammersteinModel make_model(std::size_t basis_size, double a_max, std::size_t fir_taps) {
    return HammersteinModel(SplineBasis(basis_size, a_max), fir_taps);
}

py::dict result_dict(const ExperimentResult& r) {
    std::vector<std::uint64_t> update, cost;
    std::vector<double> epoch, nmse;
    for (const auto& p : r.curve.points) {
        update.push_back(p.update);
        epoch.push_back(p.epoch);
        nmse.push_back(p.nmse_db);
        cost.push_back(p.cum_cost);
    }
    py::dict curve;
    curve["update"] = py::array(py::cast(update));
    curve["epoch"] = py::array(py::cast(epoch));
    curve["nmse_db"] = py::array(py::cast(nmse));
    curve["cum_cost"] = py::array(py::cast(cost));

    py::dict out;
    out["label"] = r.summary.label;
    out["epochs_to_target"] = r.summary.epochs_to_target;
    out["relative_complexity"] = r.summary.relative_complexity;
    out["final_nmse_db"] = r.summary.final_nmse_db;
    out["updates"] = r.updates;
    out["cost_per_update"] = r.cost_per_update;
    out["aborted_at"] = r.summary.aborted_at;
    out["abort_reason"] = r.abort_reason;
    out["curve"] = curve;
    out["model"] = r.model;
    return out;
}

}  // namespace

PYBIND11_MODULE(_sic, m) {
    m.doc() = "Hammerstein self-interference canceller: models, optimizers and experiment harness";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
    py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_ArithmeticError);

    m.def("cost_mnm", [](std::size_t k, std::size_t n) { return cost_mnm(CostModel{k, n}); }, py::arg("K"),
          py::arg("N"));
    m.def("cost_cg", [](std::size_t k, std::size_t n, std::uint64_t l) { return cost_cg(CostModel{k, n}, l); },
          py::arg("K"), py::arg("N"), py::arg("L"));
    m.def("cost_grad", [](std::size_t k, std::size_t n) { return cost_grad(CostModel{k, n}); }, py::arg("K"),
          py::arg("N"));
    m.def("relative_cost",
          [](std::uint64_t cost, std::size_t k, std::size_t n) { return relative_cost(cost, CostModel{k, n}); },
          py::arg("cost"), py::arg("K"), py::arg("N"));

    m.def("hermitian_solve", [](const CArray& a, const CArray& b) {
        return to_array(hermitian_solve(to_hermitian(a), to_vector(b)));
    }, py::arg("M"), py::arg("b"), "Solves M x = b for Hermitian positive definite M.");
    m.def("cg_solve", [](const CArray& a, const CArray& b, std::size_t l, std::optional<CArray> x0) {
        const HermitianMatrix mat = to_hermitian(a);
        const ComplexVector rhs = to_vector(b);
        const ComplexVector start = x0 ? to_vector(*x0) : ComplexVector(rhs.size());
        const CgResult r = cg_solve(mat, rhs, start, l, 1e-14);
        return py::make_tuple(to_array(r.x), r.iterations);
    }, py::arg("M"), py::arg("b"), py::arg("L"), py::arg("x0") = py::none(),
       "At most L conjugate-gradient iterations on x^H M x + b^H x + x^H b. Returns (x, iterations).");

    m.def("lr_schedule", [](std::uint64_t t, std::uint64_t total, double mu0, double a0, double a1) {
        AdamConfig c;
        c.total_steps = total;
        c.mu0 = mu0;
        c.alpha_start = a0;
        c.alpha_end = a1;
        return lr_schedule(t, c);
    }, py::arg("t"), py::arg("total_steps"), py::arg("mu0") = 1e-4, py::arg("alpha_start") = 1.0,
       py::arg("alpha_end") = 1e-4);

    m.def("nmse_db", [](const CArray& d, const CArray& e) { return nmse_db(to_vector(d), to_vector(e)); },
          py::arg("d"), py::arg("e"));

    m.def("gen_ofdm", [](std::size_t n, std::uint64_t seed, double bw, double fs, unsigned qam, std::size_t nfft,
                         std::size_t cp) {
        WaveformConfig c;
        c.n_samples = n;
        c.seed = seed;
        c.bandwidth_hz = bw;
        c.sample_rate_hz = fs;
        c.qam_order = qam;
        c.fft_size = nfft;
        c.cp_len = cp;
        return to_array(gen_ofdm(c));
    }, py::arg("n_samples") = 78960, py::arg("seed") = 1, py::arg("bandwidth_hz") = 60e6,
       py::arg("sample_rate_hz") = 484e6, py::arg("qam_order") = 16, py::arg("fft_size") = 1024,
       py::arg("cp_len") = 72);
    m.def("gen_amplitude_probe", [](std::size_t n, std::uint64_t seed) { return to_array(gen_amplitude_probe(n, seed)); },
          py::arg("n_samples"), py::arg("seed") = 1);
    m.def("pa_apply", [](const CArray& x, std::optional<std::vector<cplx>> coeffs, bool normalize) {
        PaSimModel pa = PaSimModel::reference();
        if (coeffs) {
            if (coeffs->size() != 4) throw UsageError("pa_apply: coeffs must be [c1, c3, c5, c7]");
            pa.c1 = (*coeffs)[0];
            pa.c3 = (*coeffs)[1];
            pa.c5 = (*coeffs)[2];
            pa.c7 = (*coeffs)[3];
            pa.normalize_output = normalize;
        }
        return to_array(pa_apply(to_vector(x), pa));
    }, py::arg("x"), py::arg("coeffs") = py::none(), py::arg("normalize") = false,
       "Odd-order polynomial PA. Without coeffs the reference PA (output renormalized) is used.");

    py::class_<HammersteinModel>(m, "HammersteinModel")
        .def(py::init(&make_model), py::arg("basis_size") = 8, py::arg("a_max") = 1.0, py::arg("fir_taps") = 51)
        .def_property_readonly("num_params", &HammersteinModel::num_params)
        .def_property_readonly("basis_size", &HammersteinModel::p)
        .def_property_readonly("fir_taps", &HammersteinModel::m)
        .def_property_readonly("a_max", [](const HammersteinModel& s) { return s.basis().a_max(); })
        .def_property_readonly("h", [](const HammersteinModel& s) { return to_array(s.h()); })
        .def_property_readonly("w", [](const HammersteinModel& s) { return to_array(s.w()); })
        .def_property(
            "params", [](const HammersteinModel& s) { return to_array(s.params().values()); },
            [](HammersteinModel& s, const CArray& z) { s.set_params(ParamVector(s.p(), s.m(), to_vector(z))); })
        .def("forward", [](const HammersteinModel& s, const CArray& x) { return to_array(s.forward(to_vector(x))); },
             py::arg("x"))
        .def("jacobian", [](const HammersteinModel& s, const CArray& x) { return to_array(s.jacobian(to_vector(x))); },
             py::arg("x"))
        .def("save", [](const HammersteinModel& s) {
            std::ostringstream os;
            s.save(os);
            return os.str();
        }, "Model file text.")
        .def_static("load", [](const std::string& text) {
            std::istringstream is(text);
            return HammersteinModel::load(is);
        }, py::arg("text"));

    m.def("format_config", [](const std::string& text) { return format_config(parse_config(text)); },
          py::arg("text"), "Parses key = value config text and returns its canonical form.");
    m.def("planned_updates", [](const std::string& text, std::size_t signal_length) {
        return planned_updates(parse_config(text), signal_length);
    }, py::arg("config"), py::arg("signal_length"));
    m.def("run_experiment", [](const std::string& text) {
        const ExperimentConfig cfg = parse_config(text);
        std::optional<ExperimentResult> r;
        {
            py::gil_scoped_release release;
            r = run_experiment(cfg, prepare_dataset(cfg));
        }
        return result_dict(*r);
    }, py::arg("config"), "Runs one training experiment from config text and returns summary, curve and model.");
}
