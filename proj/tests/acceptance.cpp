// Acceptance suite: runs every deliverable criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hilmod/bundle_geometry.hpp"
#include "hilmod/io.hpp"
#include "hilmod/localization.hpp"
#include "hilmod/model_theory.hpp"

using namespace hilmod;

namespace {

struct Checker {
    int failures = 0;
    std::string first_failure;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            if (first_failure.empty()) first_failure = what;
        }
    }
    void close(double got, double want, double tol, const std::string& what) {
        require(std::abs(got - want) <= tol,
                what + ": got " + std::to_string(got) + ", want " + std::to_string(want));
    }
};

using Body = std::function<void(Checker&)>;

int run_criterion(int id, const std::string& label, double time_limit_s, const Body& body) {
    Checker c;
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit_s > 0 && elapsed >= time_limit_s)
        c.require(false, "runtime " + std::to_string(elapsed) + " s exceeds " +
                             std::to_string(time_limit_s) + " s");
    bool pass = c.failures == 0;
    std::printf("%s  criterion %d: %s  (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                elapsed, pass ? "" : " -- ", pass ? "" : c.first_failure.c_str());
    std::fflush(stdout);
    return pass ? 0 : 1;
}

const KernelSpec kBergman = KernelSpec::weighted_bergman(0.0);

// --- criterion bodies -------------------------------------------------------

void metric_h_goldens(Checker& c) {
    std::vector<Complex> grid;
    for (int i = 0; i < 25; ++i) {
        double r = 0.9 * i / 24.0;
        grid.push_back(r * std::exp(Complex(0, 0.7 * i)));
    }
    RadialMetric hardy = RadialMetric::hardy();
    for (Complex w : grid) {
        double s = 1.0 - std::norm(w);
        c.close(metric_h(hardy, w, 0.05), s, 1e-9, "h for the Hardy module");
        c.close(metric_h(RadialMetric::bergman(0.0), w, 0.05), s / std::sqrt(2.0), 1e-9,
                "h for the Bergman module");
        for (double alpha : {0.5, 1.0, 2.0})
            c.close(metric_h(RadialMetric::bergman(alpha), w, 0.05), s / std::sqrt(2.0 + alpha),
                    1e-9, "h for the weighted Bergman module");
    }
}

void curvature_matrix_goldens(Checker& c) {
    Frame f = power_frame(kBergman, 2);
    CurvatureReport at0 = bundle_curvature(f, 0.0, CurvMethod::Series);
    c.close(at0.matrix(0, 0).real(), -3.0, 1e-8, "entry (0,0) at 0");
    c.close(at0.matrix(1, 1).real(), -2.0, 1e-8, "entry (1,1) at 0");
    c.close(std::abs(at0.matrix(0, 1)), 0.0, 1e-10, "off-diagonal at 0");

    for (int j = 0; j < 9; ++j) {
        Complex w = (0.7 * j / 8.0) * std::exp(Complex(0, 0.9 * j));
        double r = std::norm(w);
        CurvatureReport series = bundle_curvature(f, w, CurvMethod::Series);
        CurvatureReport fd = bundle_curvature(f, w, CurvMethod::FiniteDifference);
        double want00 = -(3.0 + 2.0 * r + 3.0 * r * r) / std::pow(1.0 - r * r, 2);
        double want11 = -2.0 / std::pow(1.0 - r, 2);
        c.close(series.matrix(0, 0).real(), want00, 1e-6, "rational form, entry (0,0)");
        c.close(series.matrix(1, 1).real(), want11, 1e-6, "rational form, entry (1,1)");
        c.require((series.matrix - fd.matrix).cwiseAbs().maxCoeff() <= 1e-6,
                  "series and finite-difference routes agree");
    }
}

void shift_table(Checker& c) {
    WeightedShift t0 = restriction_shift(kBergman, 2, 0);
    WeightedShift t1 = restriction_shift(kBergman, 2, 1);
    WeightedShift mz = restriction_shift(kBergman, 1, 0);
    for (int l = 0; l < 512; ++l) {
        c.close(t0.weight(l), std::sqrt((2.0 * l + 1) / (2.0 * l + 3)), 1e-12, "weights of T0");
        c.close(t1.weight(l), std::sqrt((l + 1.0) / (l + 2.0)), 1e-12, "weights of T1");
    }
    c.require(unitarily_equivalent(t1, mz).equivalent == Equivalence::UnitarilyEquivalent,
              "T1 is unitarily equivalent to the Bergman shift");
    c.require(unitarily_equivalent(t0, t1).equivalent != Equivalence::UnitarilyEquivalent,
              "T0 and T1 are not unitarily equivalent");

    SimilarityVerdict v = similarity_intertwiner(mz, t0);
    c.require(v.equivalent == Equivalence::SimilarNotUnitary, "Bergman -> T0 is similar");
    c.require(v.inf_abs >= 0.7, "intertwiner bounded below by 0.7");
    c.require(std::isfinite(v.sup_abs), "intertwiner bounded above");
}

void reducing_lattice(Checker& c) {
    for (int m = 1; m <= 6; ++m) {
        ReducingReport rep = reducing_curvatures(kBergman, m);
        for (int k = 0; k < m; ++k) {
            double want = -(m + k + 1.0) / (k + 1.0);
            c.close(rep.curvatures[static_cast<size_t>(k)], want, 1e-8, "curvature value");

            // independent series oracle: -a_1/a_0 with a_l = 1/beta_l^2
            WeightedShift s = restriction_shift(kBergman, m, k);
            double w0 = s.weight(0);
            c.close(rep.curvatures[static_cast<size_t>(k)], -1.0 / (w0 * w0), 1e-8,
                    "series oracle -a1/a0");

            // finite-difference oracle
            double fd = line_curvature(RadialMetric::from_shift(s), Complex(0.0),
                                       CurvMethod::FiniteDifference);
            c.close(rep.curvatures[static_cast<size_t>(k)], fd, 1e-8, "FD oracle");
        }
        if (m > 1)
            c.require(rep.verdict == LatticeVerdict::FiniteDiscrete, "distinct values verdict");
    }
    // the printed m = 2 instance
    ReducingReport m2 = reducing_curvatures(kBergman, 2);
    c.close(m2.curvatures[0], -3.0, 1e-8, "m=2 value at k=0");
    c.close(m2.curvatures[1], -2.0, 1e-8, "m=2 value at k=1");
}

void bidisk_localization(Checker& c) {
    KernelSpec bidisk = KernelSpec::hardy_polydisk(2);
    std::vector<Complex> origin{Complex(0.0), Complex(0.0)};
    for (int cap : {3, 4, 5}) {
        QuotientDim full = quotient_dim(TruncatedModule::full(bidisk, cap), origin, 1);
        c.require(full.value == 1 && full.exact, "full module localizes to dimension 1");
        QuotientDim vanish =
            quotient_dim(TruncatedModule::vanishing_at_origin(bidisk, cap), origin, 1);
        c.require(vanish.value == 2 && vanish.exact, "vanishing submodule localizes to dimension 2");
    }
}

void hilbert_samuel_fits(Checker& c) {
    KernelSpec disk = KernelSpec::hardy_disk();
    HilbertSamuelFit line = hilbert_samuel(TruncatedModule::full(disk, 7), {Complex(0.0)}, 6);
    c.require(line.degree == 1, "disk degree 1");
    for (int k = 1; k <= 6; ++k)
        c.require(hs_poly_eval(line, k) == k && line.dims[static_cast<size_t>(k - 1)] == k,
                  "disk dimensions equal k");

    KernelSpec bidisk = KernelSpec::hardy_polydisk(2);
    std::vector<Complex> origin{Complex(0.0), Complex(0.0)};
    HilbertSamuelFit quad = hilbert_samuel(TruncatedModule::full(bidisk, 7), origin, 6);
    c.require(quad.degree == 2, "bidisk degree 2");
    for (int k = 1; k <= 6; ++k) {
        long long want = static_cast<long long>(k) * (k + 1) / 2;
        c.require(hs_poly_eval(quad, k) == want, "bidisk polynomial is k(k+1)/2");
        c.require(quad.dims[static_cast<size_t>(k - 1)] == want, "bidisk dimensions");
    }

    HilbertSamuelFit doubled = hilbert_samuel(TruncatedModule::full(bidisk, 7, 2), origin, 6);
    for (int k = 1; k <= 6; ++k)
        c.require(doubled.dims[static_cast<size_t>(k - 1)] ==
                      2 * quad.dims[static_cast<size_t>(k - 1)],
                  "doubling the multiplicity doubles the dimensions");
}

void characteristic_function(Checker& c) {
    FiniteContraction zero((Eigen::MatrixXcd(1, 1) << Complex(0.0)).finished());
    std::mt19937 rng(911);
    std::uniform_real_distribution<double> u(-0.66, 0.66);
    for (int i = 0; i < 10; ++i) {
        Complex z(u(rng), u(rng));
        CharFnSample s = char_function(zero, z);
        c.require(s.theta(0, 0) == z, "theta(z) = z for the zero operator");
    }

    Eigen::MatrixXcd j2 = Eigen::MatrixXcd::Zero(2, 2);
    j2(0, 1) = 1.0;
    FiniteContraction jordan(j2);
    for (int i = 0; i < 10; ++i) {
        Complex z(u(rng), u(rng));
        CharFnSample s = char_function(jordan, z);
        c.close(std::abs(s.theta.determinant()), std::norm(z), 1e-9,
                "determinant modulus |z|^2 for the Jordan block");
    }

    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> scale(0.3, 1.0);
    std::uniform_real_distribution<double> disc(-0.95, 0.95);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int d = 1 + static_cast<int>(rng() % 6);
        Eigen::MatrixXcd m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        FiniteContraction t(m * (scale(rng) / svd.singularValues()(0)));
        for (int i = 0; i < 20; ++i) {
            Complex z(disc(rng), disc(rng));
            if (std::abs(z) > 0.95) z *= 0.95 / std::abs(z);
            Eigen::JacobiSVD<Eigen::MatrixXcd> ts(char_function(t, z).theta);
            if (ts.singularValues().size() > 0 && ts.singularValues()(0) > 1.0 + 1e-8)
                ++violations;
        }
    }
    c.require(violations == 0, "contractivity violations: " + std::to_string(violations));
}

void ratio_obstruction(Checker& c) {
    std::vector<std::pair<double, double>> pairs{{0.0, 1.0}, {0.5, 2.0}, {1.0, 0.0}};
    for (auto [a, b] : pairs) {
        for (int i = 1; i <= 12; ++i) {
            double x = 0.85 * i / 12.0;
            RatioResult r = quasi_similarity_ratio(a, b, Complex(x, 0.0));
            double slope = std::log(r.ratio) / std::log(1.0 - x * x);
            c.close(slope, (a - b) / 2.0, 1e-10, "log-ratio slope");
            c.require((r.verdict == MapObstruction::NoNonzeroMap) == (a < b),
                      "verdict matches the sign of beta - alpha");
        }
    }
}

void property_suites(Checker& c) {
    // frame-scaling invariance
    {
        RadialMetric g = RadialMetric::bergman(1.0);
        for (double s : {0.5, 3.0})
            for (Complex w : {Complex(0.0), Complex(0.4, -0.2)})
                c.close(line_curvature(g.scaled(s), w), line_curvature(g, w), 1e-10,
                        "scale invariance of the line curvature");

        Frame f = power_frame(kBergman, 2);
        Eigen::MatrixXcd d(2, 2);
        d << Complex(1.5, 0.25), Complex(0.4, 0.0), Complex(0.0), Complex(0.0, 2.0);
        Frame fr = f.rescaled(d);
        for (Complex w : {Complex(0.15, 0.1), Complex(-0.3, 0.2)}) {
            CurvatureReport a = bundle_curvature(f, w, CurvMethod::Series);
            CurvatureReport b = bundle_curvature(fr, w, CurvMethod::FiniteDifference);
            for (size_t i = 0; i < a.eigenvalues.size(); ++i)
                c.close(a.eigenvalues[i], b.eigenvalues[i], 1e-6,
                        "eigenvalues under frame rescaling");
        }
    }
    // kernel positivity
    {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        for (KernelSpec spec : {KernelSpec::hardy_disk(), KernelSpec::weighted_bergman(0.0),
                                KernelSpec::drury_arveson(2), KernelSpec::hardy_polydisk(2)}) {
            const int npts = 8;
            std::vector<PointInDomain> pts;
            for (int i = 0; i < npts; ++i) {
                std::vector<Complex> coords;
                for (int v = 0; v < spec.variables(); ++v)
                    coords.emplace_back(u(rng) / spec.variables(), u(rng) / spec.variables());
                pts.emplace_back(coords, 0.05);
            }
            Eigen::MatrixXcd gram(npts, npts);
            for (int i = 0; i < npts; ++i)
                for (int j = 0; j < npts; ++j) gram(i, j) = kernel_eval(spec, pts[i], pts[j]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
            c.require(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff(),
                      "kernel Gram matrix positivity");
        }
    }
    // Richardson order of the plain stencil
    {
        RadialMetric g = RadialMetric::bergman(0.0);
        for (Complex w : {Complex(0.2, 0.1), Complex(0.0, 0.45)}) {
            double exact = line_curvature(g, w, CurvMethod::ClosedForm);
            double e1 =
                std::abs(line_curvature(g, w, CurvMethod::FiniteDifference, {1e-2, 0}) - exact);
            double e2 =
                std::abs(line_curvature(g, w, CurvMethod::FiniteDifference, {5e-3, 0}) - exact);
            double factor = e1 / e2;
            c.require(factor >= 3.5 && factor <= 4.5,
                      "step-halving factor " + std::to_string(factor));
        }
    }
    // orthogonal decomposition completeness, m <= 5
    {
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> u(-0.55, 0.55);
        for (int m = 2; m <= 5; ++m) {
            for (int trial = 0; trial < 20; ++trial) {
                Complex z(u(rng), u(rng)), w(u(rng), u(rng));
                Complex zw = z * std::conj(w);
                Complex total = 0.0;
                for (int k = 0; k < m; ++k) {
                    for (int l = 0; m * l + k < 160; ++l)
                        total += std::pow(zw, m * l + k) / moment(kBergman, {m * l + k});
                }
                Complex full = kernel_eval(kBergman, PointInDomain(z), PointInDomain(w));
                c.require(std::abs(total - full) <= 1e-9 * (1.0 + std::abs(full)),
                          "slice kernels sum to the full kernel");
            }
        }
    }
    // symmetric Fock slices match weighted Bergman shifts (ell = 0 is Hardy)
    {
        KernelSpec da = KernelSpec::drury_arveson(2);
        for (int ell = 0; ell <= 4; ++ell) {
            WeightedShift slice = coordinate_slice_shift(da, 0, {0, ell});
            WeightedShift ref = ell == 0
                                    ? restriction_shift(KernelSpec::hardy_disk(), 1, 0)
                                    : restriction_shift(KernelSpec::weighted_bergman(ell - 1.0), 1, 0);
            for (int a = 0; a < 50; ++a)
                c.require(std::abs(slice.weight(a) - ref.weight(a)) <= 1e-12,
                          "slice weights match the weighted Bergman shift");
        }
    }
}

}  // namespace

int main() {
    int failures = 0;
    auto total_start = std::chrono::steady_clock::now();
    failures += run_criterion(1, "metric invariant h on the model modules", 1.0, metric_h_goldens);
    failures += run_criterion(2, "curvature matrix of the order-two power frame", 5.0,
                              curvature_matrix_goldens);
    failures += run_criterion(3, "weights and intertwiners of the power-shift slices", 1.0,
                              shift_table);
    failures += run_criterion(4, "reducing-slice curvature table and lattice verdict", 2.0,
                              reducing_lattice);
    failures += run_criterion(5, "bidisk localization dimensions", 1.0, bidisk_localization);
    failures += run_criterion(6, "Hilbert-Samuel polynomial fits", 10.0, hilbert_samuel_fits);
    failures += run_criterion(7, "characteristic function of finite contractions", 5.0,
                              characteristic_function);
    failures += run_criterion(8, "norm-ratio obstruction exponent and verdict", 1.0,
                              ratio_obstruction);
    failures += run_criterion(9, "property suites", 60.0, property_suites);
    double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();
    std::printf("%s  %d criterion(s) failed  (total %.2f s)\n", failures == 0 ? "OK" : "NOT OK",
                failures, total);
    return failures == 0 ? 0 : 1;
}
