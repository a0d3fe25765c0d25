// hilmod: batch CLI over the kernel-module invariant library.
//
// Exit codes: 0 success, 2 usage error, 3 numeric/truncation error,
// 4 indeterminate verdict.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "hilmod/io.hpp"

namespace {

using namespace hilmod;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Complex parse_complex(const std::string& text) {
    size_t comma = text.find(',');
    try {
        if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
        return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
    } catch (const std::exception&) {
        throw UsageError("cannot parse complex number: " + text);
    }
}

std::vector<Complex> parse_point(const std::string& text) {
    std::vector<Complex> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t semi = text.find(';', pos);
        std::string part = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        if (!part.empty()) out.push_back(parse_complex(part));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    if (out.empty()) throw UsageError("empty point");
    return out;
}

int resolve_precision(int flag_value) {
    int p = flag_value;
    if (p == 0) {
        if (const char* env = std::getenv("HILMOD_PRECISION")) p = std::atoi(env);
    }
    if (p == 0) p = 12;
    if (p < 6 || p > 17) throw UsageError("precision must lie in [6, 17]");
    return p;
}

void check_margin(double margin) {
    if (!(margin > 0.0 && margin < 0.5)) throw UsageError("margin must lie in (0, 0.5)");
}

struct GridSpec {
    std::string kind;  // "", "radial", "box"
    int n = 0;
    double rmax = 0.7;

    bool active() const { return !kind.empty(); }

    std::vector<Complex> points() const {
        std::vector<Complex> pts;
        if (kind == "radial") {
            if (n < 1 || n > 10000) throw UsageError("grid resolution must lie in [1, 10000]");
            for (int j = 0; j < n; ++j)
                pts.emplace_back(n == 1 ? 0.0 : rmax * j / (n - 1), 0.0);
        } else if (kind == "box") {
            if (n < 1 || static_cast<long long>(n) * n > 10000)
                throw UsageError("box grid resolution must satisfy n*n <= 10000");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double x = n == 1 ? 0.0 : -rmax + 2.0 * rmax * j / (n - 1);
                    double y = n == 1 ? 0.0 : -rmax + 2.0 * rmax * i / (n - 1);
                    if (std::hypot(x, y) <= rmax) pts.emplace_back(x, y);
                }
        } else {
            throw UsageError("grid kind must be radial or box");
        }
        return pts;
    }
};

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        io::write_file_atomic(out_path, text);
    }
}

KernelSpec make_spec(const std::string& family, double alpha, int vars,
                     const std::string& moments_path) {
    if (family == "hardy" || family == "hardy-disk") return KernelSpec::hardy_disk();
    if (family == "bergman" || family == "bergman-disk" || family == "weighted-bergman")
        return KernelSpec::weighted_bergman(alpha);
    if (family == "drury-arveson") return KernelSpec::drury_arveson(vars);
    if (family == "hardy-bidisk") return KernelSpec::hardy_polydisk(2);
    if (family == "hardy-polydisk") return KernelSpec::hardy_polydisk(vars);
    if (family == "custom") {
        if (moments_path.empty()) throw UsageError("custom family needs --moments <file>");
        return KernelSpec::custom(io::moments_from_json(io::read_file(moments_path)));
    }
    throw UsageError("unknown family: " + family);
}

RadialMetric make_metric(const std::string& family, double alpha, const std::string& shift_text) {
    if (!shift_text.empty()) {
        WeightedShift s = shift_text[0] == '{' ? io::shift_from_json(shift_text)
                                               : io::shift_from_json(io::read_file(shift_text));
        return RadialMetric::from_shift(s);
    }
    if (family == "hardy" || family == "hardy-disk") return RadialMetric::hardy();
    if (family == "bergman" || family == "bergman-disk" || family == "weighted-bergman")
        return RadialMetric::bergman(alpha);
    if (family == "constant") return RadialMetric::constant();
    throw UsageError("unknown metric family: " + family);
}

CurvMethod parse_method(const std::string& text) {
    if (text == "series") return CurvMethod::Series;
    if (text == "fd" || text == "finite-difference") return CurvMethod::FiniteDifference;
    if (text == "closed" || text == "closed-form") return CurvMethod::ClosedForm;
    throw UsageError("unknown method: " + text);
}

WeightedShift load_shift(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '{') text = io::read_file(arg);
    std::string lstrip = text.substr(text.find_first_not_of(" \t\r\n"));
    if (!lstrip.empty() && lstrip[0] == '{') return io::shift_from_json(lstrip);
    return io::weights_from_csv(text);
}

double num_round(double x, int digits) { return io::round_to_digits(x, digits); }

json complex_json(Complex z, int digits) {
    return json::array({num_round(z.real(), digits), num_round(z.imag(), digits)});
}

const char* verdict_name(Equivalence e) {
    switch (e) {
        case Equivalence::UnitarilyEquivalent: return "unitarily-equivalent";
        case Equivalence::SimilarNotUnitary: return "similar-not-unitary";
        case Equivalence::NotSimilar: return "not-similar";
        case Equivalence::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

// ---------------------------------------------------------------------------
// command state

struct KernelEvalCmd {
    std::string family = "hardy", moments, z_text, w_text, format = "text", out;
    double alpha = 0.0, margin = kDefaultMargin;
    int vars = 1, terms = kDefaultTerms, precision = 0;

    int run() const {
        int digits = resolve_precision(precision);
        check_margin(margin);
        KernelSpec spec = make_spec(family, alpha, vars, moments);
        PointInDomain z(parse_point(z_text), margin), w(parse_point(w_text), margin);
        KernelValue v = kernel_eval_bound(spec, z, w, terms);
        if (v.tail_bound > 1e-9 * (1.0 + std::abs(v.value)))
            throw TruncationError("kernel series tail exceeds tolerance", v.tail_bound);
        if (format == "json") {
            json doc;
            doc["value"] = complex_json(v.value, digits);
            doc["tail_bound"] = v.tail_bound;
            emit(out, doc.dump());
        } else {
            emit(out, io::fmt_complex_pair(v.value, digits));
        }
        return 0;
    }
};

struct CurvLineCmd {
    std::string family = "hardy", shift, omega_text = "0", method = "series", format = "text", out;
    double alpha = 0.0, margin = kDefaultMargin, fd_step = 1e-3, rmax = 0.7;
    int richardson = 1, precision = 0, grid_n = 0;
    std::string grid_kind;

    int run() const {
        int digits = resolve_precision(precision);
        check_margin(margin);
        RadialMetric g = make_metric(family, alpha, shift);
        CurvMethod m = parse_method(method);
        FDOptions fd{fd_step, richardson};
        if (!grid_kind.empty()) {
            GridSpec grid{grid_kind, grid_n, rmax};
            std::string csv = "re,im,curvature\n";
            json arr = json::array();
            for (Complex w : grid.points()) {
                double k = line_curvature(g, w, m, fd, margin);
                if (format == "json")
                    arr.push_back({{"omega", complex_json(w, digits)}, {"curvature", num_round(k, digits)}});
                else
                    csv += io::fmt_complex_pair(w, digits) + "," + io::fmt_real(k, digits) + "\n";
            }
            emit(out, format == "json" ? arr.dump() : csv);
            return 0;
        }
        double k = line_curvature(g, parse_complex(omega_text), m, fd, margin);
        if (format == "json") {
            json doc{{"omega", complex_json(parse_complex(omega_text), digits)},
                     {"curvature", num_round(k, digits)}};
            emit(out, doc.dump());
        } else {
            emit(out, io::fmt_real(k, digits));
        }
        return 0;
    }
};

struct CurvBundleCmd {
    std::string family = "bergman", moments, omega_text = "0", method = "series", format = "json", out;
    double alpha = 0.0, margin = kDefaultMargin, fd_step = 1e-3, rmax = 0.7;
    int m = 2, terms = kDefaultTerms, richardson = 1, precision = 0, grid_n = 0;
    std::string grid_kind;

    int run() const {
        int digits = resolve_precision(precision);
        check_margin(margin);
        KernelSpec spec = make_spec(family, alpha, 1, moments);
        Frame f = power_frame(spec, m);
        CurvMethod mm = parse_method(method);
        FDOptions fd{fd_step, richardson};
        if (!grid_kind.empty()) {
            GridSpec grid{grid_kind, grid_n, rmax};
            std::string csv = "re,im";
            for (int i = 0; i < m; ++i) csv += ",eig_" + std::to_string(i);
            csv += "\n";
            for (Complex w : grid.points()) {
                CurvatureReport rep = bundle_curvature(f, w, mm, fd, terms, margin);
                csv += io::fmt_complex_pair(w, digits);
                for (double e : rep.eigenvalues) csv += "," + io::fmt_real(e, digits);
                csv += "\n";
            }
            emit(out, csv);
            return 0;
        }
        CurvatureReport rep = bundle_curvature(f, parse_complex(omega_text), mm, fd, terms, margin);
        emit(out, io::curvature_report_to_json(rep, digits));
        return rep.verdict == LatticeVerdict::Indeterminate ? 4 : 0;
    }
};

struct ShiftAnalyzeCmd {
    std::string family = "bergman", moments, format = "csv", out;
    double alpha = 0.0;
    int m = 2, k = 0, length = 32, precision = 0;

    int run() const {
        int digits = resolve_precision(precision);
        KernelSpec spec = make_spec(family, alpha, 1, moments);
        WeightedShift s = restriction_shift(spec, m, k);
        if (format == "json") {
            json doc;
            try {
                doc["rule"] = json::parse(io::shift_rule_to_json(s));
            } catch (const Error&) {
                doc["rule"] = nullptr;
            }
            json w = json::array();
            for (int l = 0; l < length; ++l) w.push_back(num_round(s.weight(l), digits));
            doc["weights"] = w;
            emit(out, doc.dump());
        } else {
            emit(out, io::weights_to_csv(s, length, digits));
        }
        return 0;
    }
};

struct ShiftSimilarCmd {
    std::string source, target, mode = "unitary", format = "json", out;
    double tol = kWeightTol;
    int depth = kDefaultDepth, precision = 0;

    int run() const {
        int digits = resolve_precision(precision);
        WeightedShift a = load_shift(source), b = load_shift(target);
        SimilarityVerdict v = mode == "similar" ? similarity_intertwiner(a, b, depth)
                                                : unitarily_equivalent(a, b, depth, tol);
        json doc;
        doc["verdict"] = verdict_name(v.equivalent);
        doc["depth"] = v.depth;
        doc["bounds"] = json::array({num_round(v.inf_abs, digits), num_round(v.sup_abs, digits)});
        json c = json::array();
        for (size_t i = 0; i < std::min<size_t>(v.coefficients.size(), 32); ++i)
            c.push_back(num_round(v.coefficients[i], digits));
        doc["coefficients"] = c;
        emit(out, doc.dump());
        return v.equivalent == Equivalence::Inconclusive ? 4 : 0;
    }
};

struct ReduceCmd {
    std::string family = "bergman", moments, at_text = "0", format = "json", out;
    double alpha = 0.0, margin = kDefaultMargin;
    int m = 2, precision = 0;

    int run() const {
        int digits = resolve_precision(precision);
        check_margin(margin);
        KernelSpec spec = make_spec(family, alpha, 1, moments);
        Complex at = parse_complex(at_text);
        ReducingReport rep;
        if (at == Complex(0.0)) {
            rep = reducing_curvatures(spec, m);
        } else {
            for (int k = 0; k < m; ++k) {
                RadialMetric g = RadialMetric::from_shift(restriction_shift(spec, m, k));
                rep.curvatures.push_back(line_curvature(g, at, CurvMethod::Series, {}, margin));
            }
            bool distinct = true;
            for (size_t i = 0; i < rep.curvatures.size(); ++i)
                for (size_t j = i + 1; j < rep.curvatures.size(); ++j)
                    if (std::abs(rep.curvatures[i] - rep.curvatures[j]) <= kEigResolution)
                        distinct = false;
            rep.verdict = distinct ? LatticeVerdict::FiniteDiscrete : LatticeVerdict::Indeterminate;
        }
        if (format == "csv") {
            std::string csv = "k,curvature\n";
            for (size_t k = 0; k < rep.curvatures.size(); ++k)
                csv += std::to_string(k) + "," + io::fmt_real(rep.curvatures[k], digits) + "\n";
            emit(out, csv);
        } else {
            json doc;
            json c = json::array();
            for (double x : rep.curvatures) c.push_back(num_round(x, digits));
            doc["curvatures"] = c;
            doc["verdict"] = rep.verdict == LatticeVerdict::FiniteDiscrete ? "finite-discrete"
                                                                           : "indeterminate";
            emit(out, doc.dump());
        }
        return rep.verdict == LatticeVerdict::Indeterminate ? 4 : 0;
    }
};

struct SpaceOpts {
    std::string space = "hardy-bidisk", moments;
    double alpha = 0.0;
    int vars = 2;
    bool vanish_at_origin = false;

    KernelSpec spec() const { return make_spec(space, alpha, vars, moments); }
};

struct LocalizeDimCmd {
    SpaceOpts sp;
    std::string omega_text, format = "text", out;
    int k = 1, degree_cap = 0, mult = 1, precision = 0;

    int run() const {
        resolve_precision(precision);
        KernelSpec spec = sp.spec();
        int cap = degree_cap > 0 ? degree_cap : k + 2;
        TruncatedModule mod = sp.vanish_at_origin
                                  ? TruncatedModule::vanishing_at_origin(spec, cap, mult)
                                  : TruncatedModule::full(spec, cap, mult);
        std::vector<Complex> w(static_cast<size_t>(spec.variables()), Complex(0.0));
        if (!omega_text.empty()) w = parse_point(omega_text);
        QuotientDim q = quotient_dim(mod, w, k);
        if (!q.exact) std::cerr << "note: result away from the origin is approximate\n";
        if (format == "json") {
            json doc{{"dim", q.value}, {"exact", q.exact}};
            emit(out, doc.dump());
        } else {
            emit(out, std::to_string(q.value));
        }
        return 0;
    }
};

struct HsFitCmd {
    SpaceOpts sp;
    std::string omega_text, format = "json", out;
    int kmax = 6, degree_cap = 0, mult = 1, precision = 0;

    int run() const {
        resolve_precision(precision);
        KernelSpec spec = sp.spec();
        int cap = degree_cap > 0 ? degree_cap : kmax + 1;
        TruncatedModule mod = sp.vanish_at_origin
                                  ? TruncatedModule::vanishing_at_origin(spec, cap, mult)
                                  : TruncatedModule::full(spec, cap, mult);
        std::vector<Complex> w(static_cast<size_t>(spec.variables()), Complex(0.0));
        if (!omega_text.empty()) w = parse_point(omega_text);
        HilbertSamuelFit fit = hilbert_samuel(mod, w, kmax);
        emit(out, format == "csv" ? io::hs_dims_to_csv(fit) : io::hs_fit_to_json(fit));
        return 0;
    }
};

struct CharFnCmd {
    std::string matrix, z_text = "0", form = "with-defect", format = "json", out;
    double rmax = 0.9;
    int precision = 0, grid_n = 0;
    std::string grid_kind;

    int run() const {
        int digits = resolve_precision(precision);
        std::string text = matrix;
        if (text.empty()) throw UsageError("charfn needs --matrix <file or inline JSON>");
        if (text[0] != '{') text = io::read_file(text);
        FiniteContraction t(io::matrix_from_json(text));
        CharFnForm f = CharFnForm::WithDefectFactor;
        if (form == "without-defect")
            f = CharFnForm::WithoutDefectFactor;
        else if (form != "with-defect")
            throw UsageError("form must be with-defect or without-defect");

        auto sample_row = [&](Complex z) {
            CharFnSample s = char_function(t, z, f);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.theta);
            return std::make_pair(s, svd.singularValues());
        };

        if (!grid_kind.empty()) {
            if (rmax >= 1.0) throw UsageError("charfn grid must stay inside the disk");
            GridSpec grid{grid_kind, grid_n, rmax};
            std::string csv = "re_z,im_z";
            int r = std::min(t.defect_rank(), t.defect_adjoint_rank());
            for (int i = 1; i <= r; ++i) csv += ",sv_" + std::to_string(i);
            csv += ",abs_det\n";
            for (Complex z : grid.points()) {
                auto [s, sv] = sample_row(z);
                csv += io::fmt_complex_pair(z, digits);
                for (int i = 0; i < sv.size(); ++i) csv += "," + io::fmt_real(sv(i), digits);
                double adet = s.theta.rows() == s.theta.cols() && s.theta.rows() > 0
                                  ? std::abs(s.theta.determinant())
                                  : 0.0;
                csv += "," + io::fmt_real(adet, digits) + "\n";
            }
            emit(out, csv);
            return 0;
        }
        auto [s, sv] = sample_row(parse_complex(z_text));
        json doc;
        doc["z"] = complex_json(s.z, digits);
        doc["theta"] = json::parse(io::matrix_to_json(s.theta, digits)).at("rows");
        json svj = json::array();
        for (int i = 0; i < sv.size(); ++i) svj.push_back(num_round(sv(i), digits));
        doc["singular_values"] = svj;
        if (s.theta.rows() == s.theta.cols() && s.theta.rows() > 0)
            doc["abs_det"] = num_round(std::abs(s.theta.determinant()), digits);
        emit(out, doc.dump());
        return 0;
    }
};

struct RatioCmd {
    std::string omega_text = "0", format = "json", out;
    double alpha = 0.0, beta = 1.0, margin = kDefaultMargin;
    int precision = 0;

    int run() const {
        int digits = resolve_precision(precision);
        check_margin(margin);
        RatioResult r = quasi_similarity_ratio(alpha, beta, parse_complex(omega_text), margin);
        const char* verdict =
            r.verdict == MapObstruction::NoNonzeroMap ? "no-nonzero-map" : "unobstructed";
        if (format == "text") {
            emit(out, io::fmt_real(r.ratio, digits) + "," + verdict);
        } else {
            json doc{{"ratio", num_round(r.ratio, digits)}, {"verdict", verdict}};
            emit(out, doc.dump());
        }
        return 0;
    }
};

// ---------------------------------------------------------------------------
// config-file merge: the file supplies defaults, explicit flags win

std::vector<std::string> inject_config(const std::vector<std::string>& args) {
    std::string config_path;
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;

    json cfg = json::parse(io::read_file(config_path));
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

    // find the end of the subcommand tokens
    static const std::set<std::string> two_level = {"kernel", "curvature", "shift", "localize", "hs"};
    size_t insert_at = 0;
    if (!rest.empty() && !rest[0].empty() && rest[0][0] != '-') {
        insert_at = 1;
        if (two_level.count(rest[0]) && rest.size() > 1 && !rest[1].empty() && rest[1][0] != '-')
            insert_at = 2;
    }

    std::vector<std::string> merged(rest.begin(), rest.begin() + static_cast<long>(insert_at));
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) merged.push_back("--" + it.key());
        } else if (it.value().is_string()) {
            merged.push_back("--" + it.key() + "=" + it.value().get<std::string>());
        } else {
            merged.push_back("--" + it.key() + "=" + it.value().dump());
        }
    }
    merged.insert(merged.end(), rest.begin() + static_cast<long>(insert_at), rest.end());
    return merged;
}

template <typename T>
CLI::Option* opt(CLI::App* cmd, const std::string& name, T& target, const std::string& help) {
    return cmd->add_option(name, target, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_output_opts(CLI::App* cmd, std::string& format, std::string& out, int& precision) {
    opt(cmd, "--format", format, "output format");
    opt(cmd, "--out", out, "output file (atomic write); stdout when omitted");
    opt(cmd, "--precision", precision, "significant digits, 6..17 (default 12)");
}

void add_grid_opts(CLI::App* cmd, std::string& kind, int& n, double& rmax) {
    opt(cmd, "--grid", kind, "sweep kind: radial or box");
    opt(cmd, "--grid-n", n, "sweep resolution");
    opt(cmd, "--grid-rmax", rmax, "sweep radius");
}

void add_space_opts(CLI::App* cmd, SpaceOpts& sp) {
    opt(cmd, "--space", sp.space, "hardy-disk|hardy-bidisk|hardy-polydisk|bergman-disk|drury-arveson|custom");
    opt(cmd, "--alpha", sp.alpha, "weighted Bergman parameter");
    opt(cmd, "--vars", sp.vars, "variable count for polydisk/ball families");
    opt(cmd, "--moments", sp.moments, "custom moment table (JSON file)");
    cmd->add_flag("--vanish-at-origin", sp.vanish_at_origin, "use the vanishing-at-origin submodule");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex-geometric invariants of kernel Hilbert modules"};
    app.require_subcommand(1);
    int exit_code = 0;

    KernelEvalCmd kernel_eval_cmd;
    CurvLineCmd curv_line_cmd;
    CurvBundleCmd curv_bundle_cmd;
    ShiftAnalyzeCmd shift_analyze_cmd;
    ShiftSimilarCmd shift_similar_cmd;
    ReduceCmd reduce_cmd;
    LocalizeDimCmd localize_dim_cmd;
    HsFitCmd hs_fit_cmd;
    CharFnCmd charfn_cmd;
    RatioCmd ratio_cmd;

    {
        CLI::App* kernel = app.add_subcommand("kernel", "reproducing kernel operations");
        kernel->require_subcommand(1);
        CLI::App* c = kernel->add_subcommand("eval", "evaluate K(z, w)");
        opt(c, "--family", kernel_eval_cmd.family, "kernel family");
        opt(c, "--alpha", kernel_eval_cmd.alpha, "weighted Bergman parameter");
        opt(c, "--vars", kernel_eval_cmd.vars, "variable count");
        opt(c, "--moments", kernel_eval_cmd.moments, "custom moment table (JSON file)");
        opt(c, "--z", kernel_eval_cmd.z_text, "first point, re,im[;re,im...]")->required();
        opt(c, "--w", kernel_eval_cmd.w_text, "second point")->required();
        opt(c, "--terms", kernel_eval_cmd.terms, "series truncation");
        opt(c, "--margin", kernel_eval_cmd.margin, "domain margin delta");
        add_output_opts(c, kernel_eval_cmd.format, kernel_eval_cmd.out, kernel_eval_cmd.precision);
        c->callback([&] { exit_code = kernel_eval_cmd.run(); });
    }
    {
        CLI::App* curvature = app.add_subcommand("curvature", "curvature invariants");
        curvature->require_subcommand(1);
        CLI::App* line = curvature->add_subcommand("line", "line-bundle curvature of a radial metric");
        opt(line, "--family", curv_line_cmd.family, "metric family: hardy|bergman|constant");
        opt(line, "--alpha", curv_line_cmd.alpha, "weighted Bergman parameter");
        opt(line, "--shift", curv_line_cmd.shift, "metric from a shift descriptor (JSON file or inline)");
        opt(line, "--omega", curv_line_cmd.omega_text, "evaluation point");
        opt(line, "--method", curv_line_cmd.method, "series|fd|closed");
        opt(line, "--fd-step", curv_line_cmd.fd_step, "finite-difference step");
        opt(line, "--richardson", curv_line_cmd.richardson, "extrapolation levels");
        opt(line, "--margin", curv_line_cmd.margin, "domain margin delta");
        add_grid_opts(line, curv_line_cmd.grid_kind, curv_line_cmd.grid_n, curv_line_cmd.rmax);
        add_output_opts(line, curv_line_cmd.format, curv_line_cmd.out, curv_line_cmd.precision);
        line->callback([&] { exit_code = curv_line_cmd.run(); });

        CLI::App* bundle = curvature->add_subcommand("bundle", "curvature matrix of a power frame");
        opt(bundle, "--family", curv_bundle_cmd.family, "kernel family");
        opt(bundle, "--alpha", curv_bundle_cmd.alpha, "weighted Bergman parameter");
        opt(bundle, "--moments", curv_bundle_cmd.moments, "custom moment table (JSON file)");
        opt(bundle, "--m", curv_bundle_cmd.m, "power of the shift");
        opt(bundle, "--omega", curv_bundle_cmd.omega_text, "evaluation point");
        opt(bundle, "--method", curv_bundle_cmd.method, "series|fd");
        opt(bundle, "--terms", curv_bundle_cmd.terms, "series truncation");
        opt(bundle, "--fd-step", curv_bundle_cmd.fd_step, "finite-difference step");
        opt(bundle, "--richardson", curv_bundle_cmd.richardson, "extrapolation levels");
        opt(bundle, "--margin", curv_bundle_cmd.margin, "domain margin delta");
        add_grid_opts(bundle, curv_bundle_cmd.grid_kind, curv_bundle_cmd.grid_n, curv_bundle_cmd.rmax);
        add_output_opts(bundle, curv_bundle_cmd.format, curv_bundle_cmd.out, curv_bundle_cmd.precision);
        bundle->callback([&] { exit_code = curv_bundle_cmd.run(); });
    }
    {
        CLI::App* shift = app.add_subcommand("shift", "weighted shift analysis");
        shift->require_subcommand(1);
        CLI::App* an = shift->add_subcommand("analyze", "weights of a restricted power shift");
        opt(an, "--family", shift_analyze_cmd.family, "kernel family");
        opt(an, "--alpha", shift_analyze_cmd.alpha, "weighted Bergman parameter");
        opt(an, "--moments", shift_analyze_cmd.moments, "custom moment table (JSON file)");
        opt(an, "--m", shift_analyze_cmd.m, "power of the shift");
        opt(an, "--k", shift_analyze_cmd.k, "congruence class, 0 <= k < m");
        opt(an, "--length", shift_analyze_cmd.length, "number of weights to emit");
        add_output_opts(an, shift_analyze_cmd.format, shift_analyze_cmd.out,
                        shift_analyze_cmd.precision);
        an->callback([&] { exit_code = shift_analyze_cmd.run(); });

        CLI::App* sim = shift->add_subcommand("similar", "equivalence / similarity verdict");
        opt(sim, "--source", shift_similar_cmd.source, "shift descriptor (JSON/CSV file or inline)")->required();
        opt(sim, "--target", shift_similar_cmd.target, "shift descriptor")->required();
        opt(sim, "--mode", shift_similar_cmd.mode, "unitary (default) or similar");
        opt(sim, "--depth", shift_similar_cmd.depth, "comparison depth");
        opt(sim, "--tol", shift_similar_cmd.tol, "weight comparison tolerance");
        add_output_opts(sim, shift_similar_cmd.format, shift_similar_cmd.out,
                        shift_similar_cmd.precision);
        sim->callback([&] { exit_code = shift_similar_cmd.run(); });
    }
    {
        CLI::App* c = app.add_subcommand("reduce", "curvatures of the reducing slices of M_{z^m}");
        opt(c, "--family", reduce_cmd.family, "kernel family");
        opt(c, "--alpha", reduce_cmd.alpha, "weighted Bergman parameter");
        opt(c, "--moments", reduce_cmd.moments, "custom moment table (JSON file)");
        opt(c, "--m", reduce_cmd.m, "power of the shift");
        opt(c, "--at", reduce_cmd.at_text, "evaluation point (default 0)");
        opt(c, "--margin", reduce_cmd.margin, "domain margin delta");
        add_output_opts(c, reduce_cmd.format, reduce_cmd.out, reduce_cmd.precision);
        c->callback([&] { exit_code = reduce_cmd.run(); });
    }
    {
        CLI::App* localize = app.add_subcommand("localize", "module localization");
        localize->require_subcommand(1);
        CLI::App* c = localize->add_subcommand("dim", "dim M/[I_omega^k M]");
        add_space_opts(c, localize_dim_cmd.sp);
        opt(c, "--k", localize_dim_cmd.k, "ideal power");
        opt(c, "--degree-cap", localize_dim_cmd.degree_cap, "truncation degree (default k+2)");
        opt(c, "--mult", localize_dim_cmd.mult, "module multiplicity");
        opt(c, "--omega", localize_dim_cmd.omega_text, "localization point (default origin)");
        add_output_opts(c, localize_dim_cmd.format, localize_dim_cmd.out, localize_dim_cmd.precision);
        c->callback([&] { exit_code = localize_dim_cmd.run(); });
    }
    {
        CLI::App* hs = app.add_subcommand("hs", "Hilbert-Samuel analysis");
        hs->require_subcommand(1);
        CLI::App* c = hs->add_subcommand("fit", "fit the dimension-count polynomial");
        add_space_opts(c, hs_fit_cmd.sp);
        opt(c, "--kmax", hs_fit_cmd.kmax, "largest ideal power");
        opt(c, "--degree-cap", hs_fit_cmd.degree_cap, "truncation degree (default kmax+1)");
        opt(c, "--mult", hs_fit_cmd.mult, "module multiplicity");
        opt(c, "--omega", hs_fit_cmd.omega_text, "localization point (default origin)");
        add_output_opts(c, hs_fit_cmd.format, hs_fit_cmd.out, hs_fit_cmd.precision);
        c->callback([&] { exit_code = hs_fit_cmd.run(); });
    }
    {
        CLI::App* c = app.add_subcommand("charfn", "characteristic function of a finite contraction");
        opt(c, "--matrix", charfn_cmd.matrix, "matrix JSON ({\"rows\":[[{re,im},...]]}) file or inline")->required();
        opt(c, "--z", charfn_cmd.z_text, "evaluation point");
        opt(c, "--form", charfn_cmd.form, "with-defect (default) or without-defect");
        add_grid_opts(c, charfn_cmd.grid_kind, charfn_cmd.grid_n, charfn_cmd.rmax);
        add_output_opts(c, charfn_cmd.format, charfn_cmd.out, charfn_cmd.precision);
        c->callback([&] { exit_code = charfn_cmd.run(); });
    }
    {
        CLI::App* c = app.add_subcommand("ratio", "kernel-norm ratio and quasi-similarity verdict");
        opt(c, "--alpha", ratio_cmd.alpha, "source weight");
        opt(c, "--beta", ratio_cmd.beta, "target weight");
        opt(c, "--omega", ratio_cmd.omega_text, "evaluation point");
        opt(c, "--margin", ratio_cmd.margin, "domain margin delta");
        add_output_opts(c, ratio_cmd.format, ratio_cmd.out, ratio_cmd.precision);
        c->callback([&] { exit_code = ratio_cmd.run(); });
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::vector<std::string> merged = inject_config(args);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const std::string& a : merged) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hilmod::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
