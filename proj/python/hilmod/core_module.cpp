#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hilmod/bundle_geometry.hpp"
#include "hilmod/localization.hpp"
#include "hilmod/model_theory.hpp"

namespace py = pybind11;
using namespace hilmod;

namespace {

const char* lattice_name(LatticeVerdict v) {
    return v == LatticeVerdict::FiniteDiscrete ? "finite-discrete" : "indeterminate";
}

const char* equivalence_name(Equivalence e) {
    switch (e) {
        case Equivalence::UnitarilyEquivalent: return "unitarily-equivalent";
        case Equivalence::SimilarNotUnitary: return "similar-not-unitary";
        case Equivalence::NotSimilar: return "not-similar";
        case Equivalence::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

py::dict verdict_dict(const SimilarityVerdict& v) {
    py::dict d;
    d["verdict"] = equivalence_name(v.equivalent);
    d["depth"] = v.depth;
    d["coefficients"] = v.coefficients;
    d["bounds"] = py::make_tuple(v.inf_abs, v.sup_abs);
    return d;
}

RadialMetric named_metric(const std::string& family, double alpha) {
    if (family == "hardy") return RadialMetric::hardy();
    if (family == "bergman") return RadialMetric::bergman(alpha);
    if (family == "constant") return RadialMetric::constant();
    throw Error("unknown metric family: " + family);
}

CurvMethod named_method(const std::string& method) {
    if (method == "series") return CurvMethod::Series;
    if (method == "fd") return CurvMethod::FiniteDifference;
    if (method == "closed") return CurvMethod::ClosedForm;
    throw Error("unknown method: " + method);
}

TruncatedModule make_module(const KernelSpec& spec, int degree_cap, bool vanish_at_origin,
                            int mult) {
    return vanish_at_origin ? TruncatedModule::vanishing_at_origin(spec, degree_cap, mult)
                            : TruncatedModule::full(spec, degree_cap, mult);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "curvature, shift, and localization invariants of kernel Hilbert modules";

    py::register_exception<Error>(m, "HilmodError");

    py::class_<KernelSpec>(m, "KernelSpec")
        .def_static("hardy_disk", &KernelSpec::hardy_disk)
        .def_static("weighted_bergman", &KernelSpec::weighted_bergman, py::arg("alpha"))
        .def_static("drury_arveson", &KernelSpec::drury_arveson, py::arg("n"))
        .def_static("hardy_polydisk", &KernelSpec::hardy_polydisk, py::arg("n"))
        .def_property_readonly("variables", &KernelSpec::variables);

    py::class_<WeightedShift>(m, "WeightedShift")
        .def_static("from_table", &WeightedShift::from_table, py::arg("weights"))
        .def_static(
            "restriction",
            [](const KernelSpec& spec, int m_, int k) { return restriction_shift(spec, m_, k); },
            py::arg("spec"), py::arg("m"), py::arg("k"))
        .def("weight", &WeightedShift::weight, py::arg("l"))
        .def("beta", &WeightedShift::beta, py::arg("l"));

    m.def(
        "moment",
        [](const KernelSpec& spec, const MultiIndex& idx) { return moment(spec, idx); },
        py::arg("spec"), py::arg("index"));

    m.def(
        "kernel_eval",
        [](const KernelSpec& spec, const std::vector<Complex>& z, const std::vector<Complex>& w,
           int terms, double margin) {
            return kernel_eval(spec, PointInDomain(z, margin), PointInDomain(w, margin), terms);
        },
        py::arg("spec"), py::arg("z"), py::arg("w"), py::arg("terms") = kDefaultTerms,
        py::arg("margin") = kDefaultMargin);

    m.def(
        "eigenvector_residual",
        [](const KernelSpec& spec, Complex omega, const PolyCoeffs& p, int truncation,
           double margin) {
            return eigenvector_residual(spec, PointInDomain(omega, margin), p, truncation);
        },
        py::arg("spec"), py::arg("omega"), py::arg("poly"), py::arg("truncation"),
        py::arg("margin") = kDefaultMargin);

    m.def(
        "restriction_weights",
        [](const KernelSpec& spec, int m_, int k, int count) {
            WeightedShift s = restriction_shift(spec, m_, k);
            std::vector<double> w(static_cast<size_t>(count));
            for (int l = 0; l < count; ++l) w[static_cast<size_t>(l)] = s.weight(l);
            return w;
        },
        py::arg("spec"), py::arg("m"), py::arg("k"), py::arg("count"));

    m.def(
        "unitarily_equivalent",
        [](const WeightedShift& a, const WeightedShift& b, int depth, double tol) {
            return verdict_dict(unitarily_equivalent(a, b, depth, tol));
        },
        py::arg("a"), py::arg("b"), py::arg("depth") = kDefaultDepth, py::arg("tol") = kWeightTol);

    m.def(
        "similarity_intertwiner",
        [](const WeightedShift& src, const WeightedShift& tgt, int depth) {
            return verdict_dict(similarity_intertwiner(src, tgt, depth));
        },
        py::arg("source"), py::arg("target"), py::arg("depth") = kDefaultDepth);

    m.def("shift_kernel_metric", &shift_kernel_metric, py::arg("shift"), py::arg("terms"));

    m.def(
        "line_curvature",
        [](Complex omega, const std::string& family, double alpha, const std::string& method) {
            return line_curvature(named_metric(family, alpha), omega, named_method(method));
        },
        py::arg("omega"), py::arg("family") = "hardy", py::arg("alpha") = 0.0,
        py::arg("method") = "series");

    m.def(
        "metric_h",
        [](Complex omega, const std::string& family, double alpha) {
            return metric_h(named_metric(family, alpha), omega);
        },
        py::arg("omega"), py::arg("family") = "hardy", py::arg("alpha") = 0.0);

    m.def(
        "bundle_curvature",
        [](const KernelSpec& spec, int m_, Complex omega, const std::string& method) {
            CurvatureReport rep = bundle_curvature(power_frame(spec, m_), omega, named_method(method));
            py::dict d;
            d["omega"] = rep.omega;
            d["matrix"] = rep.matrix;
            d["eigenvalues"] = rep.eigenvalues;
            d["verdict"] = lattice_name(rep.verdict);
            return d;
        },
        py::arg("spec"), py::arg("m"), py::arg("omega"), py::arg("method") = "series");

    m.def(
        "reducing_curvatures",
        [](const KernelSpec& spec, int m_) {
            ReducingReport rep = reducing_curvatures(spec, m_);
            py::dict d;
            d["curvatures"] = rep.curvatures;
            d["verdict"] = lattice_name(rep.verdict);
            return d;
        },
        py::arg("spec"), py::arg("m"));

    m.def(
        "quotient_dim",
        [](const KernelSpec& spec, int degree_cap, int k, bool vanish_at_origin, int mult,
           std::optional<std::vector<Complex>> omega) {
            TruncatedModule mod = make_module(spec, degree_cap, vanish_at_origin, mult);
            std::vector<Complex> w =
                omega.value_or(std::vector<Complex>(static_cast<size_t>(spec.variables()), 0.0));
            QuotientDim q = quotient_dim(mod, w, k);
            py::dict d;
            d["dim"] = q.value;
            d["exact"] = q.exact;
            return d;
        },
        py::arg("spec"), py::arg("degree_cap"), py::arg("k"), py::arg("vanish_at_origin") = false,
        py::arg("mult") = 1, py::arg("omega") = std::nullopt);

    m.def(
        "hilbert_samuel",
        [](const KernelSpec& spec, int k_max, int degree_cap, bool vanish_at_origin, int mult) {
            int cap = degree_cap > 0 ? degree_cap : k_max + 1;
            TruncatedModule mod = make_module(spec, cap, vanish_at_origin, mult);
            std::vector<Complex> w(static_cast<size_t>(spec.variables()), 0.0);
            HilbertSamuelFit fit = hilbert_samuel(mod, w, k_max);
            py::dict d;
            d["dims"] = fit.dims;
            d["poly"] = fit.poly_text;
            d["degree"] = fit.degree;
            d["stable_from"] = fit.stable_from;
            return d;
        },
        py::arg("spec"), py::arg("k_max"), py::arg("degree_cap") = 0,
        py::arg("vanish_at_origin") = false, py::arg("mult") = 1);

    m.def(
        "char_function",
        [](const Eigen::MatrixXcd& t, Complex z, const std::string& form) {
            CharFnForm f = form == "without-defect" ? CharFnForm::WithoutDefectFactor
                                                    : CharFnForm::WithDefectFactor;
            return char_function(FiniteContraction(t), z, f).theta;
        },
        py::arg("t"), py::arg("z"), py::arg("form") = "with-defect");

    m.def(
        "localize_multiplier",
        [](const PolyCoeffs& num, const PolyCoeffs& den, Complex omega) {
            return localize_multiplier(HoloFunction{num, den}, omega);
        },
        py::arg("num"), py::arg("den"), py::arg("omega"));

    m.def(
        "quasi_similarity_ratio",
        [](double alpha, double beta, Complex omega) {
            RatioResult r = quasi_similarity_ratio(alpha, beta, omega);
            return py::make_tuple(r.ratio, r.verdict == MapObstruction::NoNonzeroMap
                                               ? "no-nonzero-map"
                                               : "unobstructed");
        },
        py::arg("alpha"), py::arg("beta"), py::arg("omega"));
}
