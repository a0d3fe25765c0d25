#include "hilmod/bundle_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hilmod {

namespace {

constexpr double kGramTailRelTol = 1e-8;

void check_interior(Complex omega, double margin, double slack = 0.0) {
    if (!(margin > 0.0 && margin < 1.0)) throw DomainError("margin must lie in (0,1)");
    if (std::abs(omega) + slack > 1.0 - margin)
        throw DomainError("point violates the domain margin");
}

}  // namespace

RadialMetric RadialMetric::from_coefficients(std::vector<double> a) {
    if (a.empty() || !(a[0] > 0.0)) throw Error("metric series needs a_0 > 0");
    for (double x : a)
        if (x < 0.0 || !std::isfinite(x)) throw Error("metric coefficients must be >= 0 and finite");
    int n = static_cast<int>(a.size());
    auto vec = std::make_shared<std::vector<double>>(std::move(a));
    RadialMetric m;
    m.coeff_ = [vec](int l) { return l < static_cast<int>(vec->size()) ? (*vec)[static_cast<size_t>(l)] : 0.0; };
    m.terms_ = n;
    for (int l = 0; l + 1 < n; ++l)
        if ((*vec)[static_cast<size_t>(l)] > 0.0)
            m.ratio_cert_ = std::max(m.ratio_cert_, (*vec)[static_cast<size_t>(l + 1)] / (*vec)[static_cast<size_t>(l)]);
    return m;
}

RadialMetric RadialMetric::from_generator(std::function<double(int)> a, int terms) {
    if (terms < 2) throw Error("metric needs at least 2 terms");
    if (!(a(0) > 0.0)) throw Error("metric series needs a_0 > 0");
    RadialMetric m;
    m.coeff_ = std::move(a);
    m.terms_ = terms;
    double prev = m.coeff_(0);
    for (int l = 1; l < std::min(terms, 128); ++l) {
        double cur = m.coeff_(l);
        if (cur < 0.0) throw Error("metric coefficients must be >= 0");
        if (l >= 8 && prev > 0.0) m.ratio_cert_ = std::max(m.ratio_cert_, cur / prev);
        prev = cur;
    }
    return m;
}

RadialMetric RadialMetric::closed_form(std::function<double(double)> g, std::function<double(double)> g1,
                                       std::function<double(double)> g2) {
    RadialMetric m;
    m.g_ = std::move(g);
    m.g1_ = std::move(g1);
    m.g2_ = std::move(g2);
    return m;
}

RadialMetric RadialMetric::hardy() {
    RadialMetric m = from_generator([](int) { return 1.0; }, kDefaultTerms);
    m.g_ = [](double r) { return 1.0 / (1.0 - r); };
    m.g1_ = [](double r) { double d = 1.0 - r; return 1.0 / (d * d); };
    m.g2_ = [](double r) { double d = 1.0 - r; return 2.0 / (d * d * d); };
    return m;
}

RadialMetric RadialMetric::bergman(double alpha) {
    MomentSequence mu = MomentSequence::weighted_bergman(alpha);
    RadialMetric m = from_generator([mu](int l) { return 1.0 / mu.at(l); }, kDefaultTerms);
    double p = 2.0 + alpha;
    m.g_ = [p](double r) { return std::pow(1.0 - r, -p); };
    m.g1_ = [p](double r) { return p * std::pow(1.0 - r, -p - 1.0); };
    m.g2_ = [p](double r) { return p * (p + 1.0) * std::pow(1.0 - r, -p - 2.0); };
    return m;
}

RadialMetric RadialMetric::constant(double c) {
    if (!(c > 0.0)) throw Error("constant metric must be positive");
    RadialMetric m = from_coefficients({c});
    m.g_ = [c](double) { return c; };
    m.g1_ = [](double) { return 0.0; };
    m.g2_ = [](double) { return 0.0; };
    return m;
}

RadialMetric RadialMetric::from_shift(const WeightedShift& s, int terms) {
    return from_generator([s](int l) { double b = s.beta(l); return 1.0 / (b * b); }, terms);
}

double RadialMetric::coefficient(int l) const {
    if (!coeff_) throw MethodError("metric has no series representation");
    return coeff_(l);
}

RadialMetric::Jet RadialMetric::jet_series(double r, int terms) const {
    if (!coeff_) throw MethodError("metric has no series representation");
    if (terms <= 0) terms = terms_;
    KahanSum g, g1, g2;
    double rp = 1.0;        // r^l
    double rp1 = 0.0;       // r^{l-1}
    double rp2 = 0.0;       // r^{l-2}
    double last = 0.0, prev = 0.0, ratio = 0.0;
    for (int l = 0; l < terms; ++l) {
        double a = coeff_(l);
        g.add(a * rp);
        if (l >= 1) g1.add(a * l * rp1);
        if (l >= 2) g2.add(a * l * (l - 1) * rp2);
        double t = a * rp;
        if (t > 0.0) {
            if (last > 0.0 && l > terms / 2) ratio = std::max(ratio, t / last);
            prev = last;
            last = t;
            (void)prev;
        }
        rp2 = rp1;
        rp1 = rp;
        rp *= r;
    }
    double tail = 0.0;
    if (last > 0.0 && r > 0.0 && ratio > 0.0) {
        if (ratio >= 1.0)
            throw TruncationError("metric series does not certify convergence at this radius",
                                  std::numeric_limits<double>::infinity());
        // dominant bound covering the l(l-1) weights of the g'' terms
        tail = last * static_cast<double>(terms) * static_cast<double>(terms) * ratio / (1.0 - ratio);
    }
    double gv = g.value();
    if (!(gv > 0.0)) throw Error("metric is not positive at this radius");
    return {gv, g1.value(), g2.value(), tail / gv};
}

RadialMetric::Jet RadialMetric::jet_closed(double r) const {
    if (!g_) throw MethodError("metric has no closed-form representation");
    double gv = g_(r);
    if (!(gv > 0.0)) throw Error("metric is not positive at this radius");
    return {gv, g1_(r), g2_(r), 0.0};
}

RadialMetric RadialMetric::scaled(double c) const {
    if (!(c > 0.0)) throw Error("metric scale must be positive");
    RadialMetric m;
    if (coeff_) {
        auto base = coeff_;
        m.coeff_ = [base, c](int l) { return c * base(l); };
        m.terms_ = terms_;
        m.ratio_cert_ = ratio_cert_;
    }
    if (g_) {
        auto g = g_, g1 = g1_, g2 = g2_;
        m.g_ = [g, c](double r) { return c * g(r); };
        m.g1_ = [g1, c](double r) { return c * g1(r); };
        m.g2_ = [g2, c](double r) { return c * g2(r); };
    }
    return m;
}

namespace {

double curvature_from_jet(const RadialMetric::Jet& j, double r) {
    // K = -(f' + r f'') for f = log g
    double f1 = j.g1 / j.g;
    double f2 = (j.g2 * j.g - j.g1 * j.g1) / (j.g * j.g);
    return -(f1 + r * f2);
}

double log_g(const RadialMetric& g, double r) {
    if (g.has_closed_form()) return std::log(g.jet_closed(r).g);
    return std::log(g.jet_series(r).g);
}

double fd_laplacian_quarter(const RadialMetric& g, Complex omega, double h) {
    double x = omega.real(), y = omega.imag();
    double c = log_g(g, x * x + y * y);
    double s = log_g(g, (x + h) * (x + h) + y * y) + log_g(g, (x - h) * (x - h) + y * y) +
               log_g(g, x * x + (y + h) * (y + h)) + log_g(g, x * x + (y - h) * (y - h));
    return (s - 4.0 * c) / (4.0 * h * h);
}

}  // namespace

double line_curvature(const RadialMetric& g, Complex omega, CurvMethod method, const FDOptions& fd,
                      double margin) {
    check_interior(omega, margin);
    double r = std::norm(omega);
    switch (method) {
        case CurvMethod::Series:
            return curvature_from_jet(g.jet_series(r), r);
        case CurvMethod::ClosedForm:
            return curvature_from_jet(g.jet_closed(r), r);
        case CurvMethod::FiniteDifference: {
            double h = fd.step;
            if (h <= 0.0 || h < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(omega)))
                throw MethodError("finite-difference step underflow; use the series method");
            if (std::abs(omega) + h > 1.0 - margin * 0.5)
                throw MethodError("finite-difference stencil leaves the domain; use the series method");
            double est = -fd_laplacian_quarter(g, omega, h);
            for (int level = 1; level <= fd.richardson; ++level) {
                h *= 0.5;
                double finer = -fd_laplacian_quarter(g, omega, h);
                double p = std::pow(4.0, level);
                est = (p * finer - est) / (p - 1.0);
            }
            return est;
        }
    }
    throw Error("unreachable");
}

double metric_h(const RadialMetric& g, Complex omega, double margin) {
    double k = line_curvature(g, omega, g.has_closed_form() ? CurvMethod::ClosedForm : CurvMethod::Series,
                              {}, margin);
    if (!(k < 0.0)) throw Error("curvature is non-negative; the metric invariant is undefined here");
    return 1.0 / std::sqrt(-k);
}

Frame::Frame(std::vector<Section> sections, MomentSequence ambient)
    : sections_(std::move(sections)), ambient_(std::move(ambient)) {
    if (sections_.empty()) throw Error("frame needs at least one section");
    if (ambient_.variables() != 1) throw ArityError("frames are defined over the disk");
}

std::vector<Complex> Frame::section_coeffs(int i, Complex omega, int terms) const {
    if (i < 0 || i >= rank()) throw Error("section index out of range");
    std::vector<Complex> c = sections_[static_cast<size_t>(i)](omega, terms);
    c.resize(static_cast<size_t>(terms), Complex(0.0));
    return c;
}

void Frame::declare_diagonal_radial(std::vector<std::function<double(int)>> diag_coeffs) {
    if (static_cast<int>(diag_coeffs.size()) != rank())
        throw Error("diagonal declaration must cover every section");
    diag_coeffs_ = std::move(diag_coeffs);
}

const std::function<double(int)>& Frame::diag_coeff(int i) const {
    if (!diagonal_radial()) throw MethodError("frame has no declared diagonal radial structure");
    return diag_coeffs_[static_cast<size_t>(i)];
}

Frame Frame::rescaled(const Eigen::MatrixXcd& d) const {
    int m = rank();
    if (d.rows() != m || d.cols() != m) throw Error("frame rescaling must be rank x rank");
    if (std::abs(d.determinant()) < 1e-12) throw Error("frame rescaling must be invertible");
    std::vector<Section> out;
    out.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        auto self = sections_;
        Eigen::VectorXcd col = d.col(j);
        out.push_back([self, col](Complex omega, int terms) {
            std::vector<Complex> acc(static_cast<size_t>(terms), Complex(0.0));
            for (int i = 0; i < static_cast<int>(self.size()); ++i) {
                if (col(i) == Complex(0.0)) continue;
                std::vector<Complex> c = self[static_cast<size_t>(i)](omega, terms);
                c.resize(static_cast<size_t>(terms), Complex(0.0));
                for (int n = 0; n < terms; ++n) acc[static_cast<size_t>(n)] += col(i) * c[static_cast<size_t>(n)];
            }
            return acc;
        });
    }
    return Frame(std::move(out), ambient_);
}

Eigen::MatrixXcd grammian(const Frame& f, Complex omega, int terms, double margin) {
    check_interior(omega, margin);
    const int m = f.rank();
    std::vector<std::vector<Complex>> s;
    s.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) s.push_back(f.section_coeffs(i, omega, terms));

    std::vector<double> mu(static_cast<size_t>(terms));
    for (int n = 0; n < terms; ++n) mu[static_cast<size_t>(n)] = f.ambient().at(n);

    // Per-section tail certificates from the decay of |s_i[n]|^2 mu_n,
    // measured on trailing blocks so that sections supported on a single
    // congruence class (or mixtures of classes) are judged fairly.
    std::vector<double> tail(static_cast<size_t>(m), 0.0);
    const int block = 8;
    for (int i = 0; i < m; ++i) {
        if (terms < 2 * block) continue;
        double b_prev = 0.0, b_last = 0.0;
        for (int n = terms - 2 * block; n < terms; ++n) {
            double t = std::norm(s[static_cast<size_t>(i)][static_cast<size_t>(n)]) *
                       mu[static_cast<size_t>(n)];
            (n < terms - block ? b_prev : b_last) += t;
        }
        if (b_last == 0.0) continue;
        double ratio = b_prev > 0.0 ? b_last / b_prev : 2.0;
        if (ratio >= 1.0)
            throw TruncationError("frame section series does not certify convergence here",
                                  std::numeric_limits<double>::infinity());
        tail[static_cast<size_t>(i)] = b_last * ratio / (1.0 - ratio);
    }

    Eigen::MatrixXcd h(m, m);
    for (int i = 0; i < m; ++i) {
        KahanSum diag;
        for (int n = 0; n < terms; ++n)
            diag.add(std::norm(s[static_cast<size_t>(i)][static_cast<size_t>(n)]) * mu[static_cast<size_t>(n)]);
        h(i, i) = diag.value();
        for (int j = i + 1; j < m; ++j) {
            KahanSumC acc;
            for (int n = 0; n < terms; ++n)
                acc.add(std::conj(s[static_cast<size_t>(i)][static_cast<size_t>(n)]) *
                        s[static_cast<size_t>(j)][static_cast<size_t>(n)] * mu[static_cast<size_t>(n)]);
            h(i, j) = acc.value();
            h(j, i) = std::conj(h(i, j));
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double bound = std::sqrt(tail[static_cast<size_t>(i)] * tail[static_cast<size_t>(j)]);
            double scale = std::sqrt(std::abs(h(i, i).real()) * std::abs(h(j, j).real())) + 1.0;
            if (bound > kGramTailRelTol * scale)
                throw TruncationError("Grammian tail exceeds tolerance; raise the term count", bound);
        }
    return h;
}

Frame power_frame(const KernelSpec& spec, int m) {
    if (spec.variables() != 1) throw ArityError("power frames require one variable");
    if (m < 1) throw Error("power must be at least 1");
    const MomentSequence mu = spec.moments();
    std::vector<Frame::Section> sections;
    std::vector<std::function<double(int)>> diag;
    sections.reserve(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        double mu_k = mu.at(k);
        sections.push_back([mu, mu_k, m, k](Complex omega, int terms) {
            std::vector<Complex> c(static_cast<size_t>(terms), Complex(0.0));
            Complex wbar_l = 1.0;
            for (int l = 0; m * l + k < terms; ++l) {
                c[static_cast<size_t>(m * l + k)] = wbar_l * (mu_k / mu.at(m * l + k));
                wbar_l *= std::conj(omega);
            }
            return c;
        });
        diag.push_back([mu, mu_k, m, k](int l) { return mu_k * mu_k / mu.at(m * l + k); });
    }
    Frame f(std::move(sections), mu);
    f.declare_diagonal_radial(std::move(diag));
    return f;
}

namespace {

Eigen::MatrixXcd wirtinger_dh(const Frame& f, Complex omega, double h, int terms, double margin) {
    Eigen::MatrixXcd hx_p = grammian(f, omega + h, terms, margin);
    Eigen::MatrixXcd hx_m = grammian(f, omega - h, terms, margin);
    Eigen::MatrixXcd hy_p = grammian(f, omega + Complex(0, h), terms, margin);
    Eigen::MatrixXcd hy_m = grammian(f, omega - Complex(0, h), terms, margin);
    return ((hx_p - hx_m) - Complex(0, 1) * (hy_p - hy_m)) / (4.0 * h);
}

Eigen::MatrixXcd connection_form(const Frame& f, Complex omega, double h, int terms, double margin) {
    Eigen::MatrixXcd hh = grammian(f, omega, terms, margin);
    Eigen::MatrixXcd dh = wirtinger_dh(f, omega, h, terms, margin);
    return hh.fullPivLu().solve(dh);
}

Eigen::MatrixXcd fd_curvature_once(const Frame& f, Complex omega, double h, int terms, double margin) {
    Eigen::MatrixXcd gx_p = connection_form(f, omega + h, h, terms, margin);
    Eigen::MatrixXcd gx_m = connection_form(f, omega - h, h, terms, margin);
    Eigen::MatrixXcd gy_p = connection_form(f, omega + Complex(0, h), h, terms, margin);
    Eigen::MatrixXcd gy_m = connection_form(f, omega - Complex(0, h), h, terms, margin);
    Eigen::MatrixXcd dbar = ((gx_p - gx_m) + Complex(0, 1) * (gy_p - gy_m)) / (4.0 * h);
    return -dbar;
}

}  // namespace

CurvatureReport bundle_curvature(const Frame& f, Complex omega, CurvMethod method,
                                 const FDOptions& fd, int terms, double margin, double cross_tol) {
    check_interior(omega, margin);
    const int m = f.rank();

    {  // frame degeneracy check
        Eigen::MatrixXcd h0 = grammian(f, omega, terms, margin);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h0);
        double lo = es.eigenvalues().minCoeff();
        double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || lo < 1e-13 * std::max(hi, 1.0))
            throw FrameError("frame Grammian is singular at this point");
    }

    bool series_ok = f.diagonal_radial();
    std::optional<Eigen::MatrixXcd> k_series;
    if (series_ok) {
        Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            RadialMetric g = RadialMetric::from_generator(f.diag_coeff(i), terms);
            k(i, i) = line_curvature(g, omega, CurvMethod::Series, fd, margin);
        }
        k_series = k;
    }

    std::optional<Eigen::MatrixXcd> k_fd;
    bool fd_feasible = fd.step > 0.0 &&
                       fd.step >= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(omega)) &&
                       std::abs(omega) + 2.0 * fd.step <= 1.0 - margin * 0.5;
    if (method == CurvMethod::FiniteDifference && !fd_feasible)
        throw MethodError("finite-difference stencil is unusable here; use the series method");
    if (fd_feasible && (method == CurvMethod::FiniteDifference || series_ok)) {
        double h = fd.step;
        Eigen::MatrixXcd est = fd_curvature_once(f, omega, h, terms, margin);
        for (int level = 1; level <= fd.richardson; ++level) {
            h *= 0.5;
            Eigen::MatrixXcd finer = fd_curvature_once(f, omega, h, terms, margin);
            double p = std::pow(4.0, level);
            est = (p * finer - est) / (p - 1.0);
        }
        k_fd = est;
    }

    if (method == CurvMethod::Series && !series_ok)
        throw MethodError("series curvature needs a declared diagonal radial frame");
    if (method == CurvMethod::ClosedForm)
        throw MethodError("bundle curvature supports Series and FiniteDifference methods");

    if (k_series && k_fd) {
        double diff = (*k_series - *k_fd).cwiseAbs().maxCoeff();
        if (diff > cross_tol)
            throw MethodError("curvature cross-check failed: series and finite-difference routes "
                              "differ by " + std::to_string(diff));
    }

    CurvatureReport report;
    report.omega = omega;
    report.matrix = method == CurvMethod::Series ? *k_series : (k_fd ? *k_fd : *k_series);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(report.matrix);
    double scale = report.matrix.cwiseAbs().maxCoeff();
    std::vector<double> eig;
    eig.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        Complex lambda = es.eigenvalues()(i);
        if (std::abs(lambda.imag()) > 1e-6 * std::max(1.0, scale))
            throw MethodError("curvature matrix has a non-real spectrum beyond tolerance");
        eig.push_back(lambda.real());
    }
    std::sort(eig.begin(), eig.end());
    report.eigenvalues = eig;

    report.multiplicities.assign(static_cast<size_t>(m), 1);
    bool distinct = true;
    for (int i = 0; i < m; ++i) {
        int mult = 1;
        for (int j = 0; j < m; ++j)
            if (j != i && std::abs(eig[static_cast<size_t>(i)] - eig[static_cast<size_t>(j)]) <= kEigResolution)
                ++mult;
        report.multiplicities[static_cast<size_t>(i)] = mult;
        if (mult > 1) distinct = false;
    }
    report.verdict = distinct ? LatticeVerdict::FiniteDiscrete : LatticeVerdict::Indeterminate;
    return report;
}

ReducingReport reducing_curvatures(const KernelSpec& spec, int m) {
    if (spec.variables() != 1) throw ArityError("reducing analysis requires one variable");
    if (m < 1) throw Error("power must be at least 1");
    ReducingReport report;
    report.curvatures.reserve(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        WeightedShift s = restriction_shift(spec, m, k);
        RadialMetric g = RadialMetric::from_shift(s);
        report.curvatures.push_back(line_curvature(g, Complex(0.0), CurvMethod::Series));
    }
    bool distinct = true;
    for (size_t i = 0; i < report.curvatures.size(); ++i)
        for (size_t j = i + 1; j < report.curvatures.size(); ++j)
            if (std::abs(report.curvatures[i] - report.curvatures[j]) <= kEigResolution)
                distinct = false;
    report.verdict = distinct ? LatticeVerdict::FiniteDiscrete : LatticeVerdict::Indeterminate;
    return report;
}

}  // namespace hilmod
