#include <doctest.h>

#include <cmath>
#include <random>

#include "hilmod/bundle_geometry.hpp"

using namespace hilmod;

namespace {

const KernelSpec kBergman = KernelSpec::weighted_bergman(0.0);

// Eq-style rational forms of the power-frame curvature entries, used as
// golden references.
double curv0_reference(double r) { return -(3.0 + 2.0 * r + 3.0 * r * r) / std::pow(1.0 - r * r, 2); }
double curv1_reference(double r) { return -2.0 / std::pow(1.0 - r, 2); }

}  // namespace

TEST_CASE("line curvature golden values") {
    CHECK(line_curvature(RadialMetric::hardy(), 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
    for (double alpha : {0.0, 1.0, 2.0, 0.5}) {
        CHECK(line_curvature(RadialMetric::bergman(alpha), 0.0) ==
              doctest::Approx(-(2.0 + alpha)).epsilon(1e-12));
    }
    CHECK(line_curvature(RadialMetric::constant(), Complex(0.3, 0.2)) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("line curvature methods agree") {
    RadialMetric metrics[] = {RadialMetric::hardy(), RadialMetric::bergman(0.0),
                              RadialMetric::bergman(1.7)};
    for (const RadialMetric& g : metrics) {
        for (int j = 0; j < 9; ++j) {
            Complex w = 0.7 * j / 8.0 * std::exp(Complex(0, 0.37 * j));
            double ks = line_curvature(g, w, CurvMethod::Series);
            double kc = line_curvature(g, w, CurvMethod::ClosedForm);
            double kf = line_curvature(g, w, CurvMethod::FiniteDifference);
            CHECK(ks == doctest::Approx(kc).epsilon(1e-10));
            CHECK(std::abs(kf - kc) <= std::max(1e-6, 1e-6 * std::abs(kc)));
        }
    }
}

TEST_CASE("finite differences fall back near the boundary") {
    RadialMetric g = RadialMetric::hardy();
    FDOptions fd;
    fd.step = 1e-3;
    CHECK_THROWS_AS(line_curvature(g, Complex(0.9995, 0.0), CurvMethod::FiniteDifference, fd, 1e-4),
                    MethodError);
    fd.step = 0.0;
    CHECK_THROWS_AS(line_curvature(g, Complex(0.1), CurvMethod::FiniteDifference, fd), MethodError);
}

TEST_CASE("plain second-order stencil halves like h^2") {
    RadialMetric metrics[] = {RadialMetric::hardy(), RadialMetric::bergman(1.0)};
    Complex pts[] = {Complex(0.1, 0.2), Complex(0.45, -0.1), Complex(0.0, 0.5)};
    for (const RadialMetric& g : metrics) {
        for (Complex w : pts) {
            double exact = line_curvature(g, w, CurvMethod::ClosedForm);
            FDOptions coarse{1e-2, 0}, fine{5e-3, 0};
            double e1 = std::abs(line_curvature(g, w, CurvMethod::FiniteDifference, coarse) - exact);
            double e2 = std::abs(line_curvature(g, w, CurvMethod::FiniteDifference, fine) - exact);
            double factor = e1 / e2;
            CHECK(factor >= 3.5);
            CHECK(factor <= 4.5);
        }
    }
}

TEST_CASE("curvature ignores constant rescaling") {
    RadialMetric g = RadialMetric::bergman(0.5);
    for (double c : {0.25, 7.0, 123.456}) {
        RadialMetric cg = g.scaled(c);
        for (Complex w : {Complex(0.0), Complex(0.3, 0.4), Complex(-0.6, 0.1)}) {
            CHECK(std::abs(line_curvature(cg, w) - line_curvature(g, w)) <= 1e-10);
        }
    }
}

TEST_CASE("metric h golden values") {
    CHECK(metric_h(RadialMetric::hardy(), Complex(0.6)) == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(metric_h(RadialMetric::bergman(0.0), Complex(0.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(metric_h(RadialMetric::bergman(2.0), Complex(0.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS(metric_h(RadialMetric::constant(), Complex(0.2)));
}

TEST_CASE("curvature stays negative on the built-in metrics") {
    RadialMetric metrics[] = {RadialMetric::hardy(), RadialMetric::bergman(0.0),
                              RadialMetric::bergman(3.0)};
    for (const RadialMetric& g : metrics)
        for (int j = 0; j <= 12; ++j) {
            Complex w = (0.95 * j / 12.0) * std::exp(Complex(0, 0.5 * j));
            CHECK(line_curvature(g, w, CurvMethod::ClosedForm, {}, 1e-3) < 0.0);
        }
}

TEST_CASE("power frame Grammian structure") {
    Frame f = power_frame(kBergman, 2);
    for (Complex w : {Complex(0.2, 0.1), Complex(-0.4, 0.3), Complex(0.0)}) {
        Eigen::MatrixXcd h = grammian(f, w);
        double r = std::norm(w);
        CHECK(std::abs(h(0, 1)) == 0.0);
        CHECK(std::abs(h(1, 0)) == 0.0);
        CHECK(h(0, 0).real() ==
              doctest::Approx((1.0 + r) / std::pow(1.0 - r, 2)).epsilon(1e-12));
        // second entry is c/(1-r)^2 for a section-normalization constant c
        double c = h(1, 1).real() * std::pow(1.0 - r, 2);
        CHECK(c == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("frame sections match the symmetrized kernel-vector route") {
    // oracle: averaging gamma over the m-th roots of omega extracts one
    // congruence class; the result must not depend on the chosen root
    const int m = 3;
    Frame f = power_frame(kBergman, m);
    const int terms = 80;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-0.55, 0.55);
    for (int trial = 0; trial < 6; ++trial) {
        Complex omega(u(rng), u(rng));
        Complex eta = std::pow(omega, 1.0 / m);  // principal branch
        for (int branch = 0; branch < 2; ++branch) {
            if (branch == 1) eta *= std::exp(Complex(0, 2.0 * M_PI / m));  // rotated branch
            for (int k = 0; k < m; ++k) {
                std::vector<Complex> symm(terms, 0.0);
                for (int j = 0; j < m; ++j) {
                    Complex root = eta * std::exp(Complex(0, 2.0 * M_PI * j / m));
                    Complex phase = std::exp(Complex(0, 2.0 * M_PI * j * k / m));
                    for (int n = 0; n < terms; ++n)
                        symm[static_cast<size_t>(n)] += phase / double(m) *
                                                        std::pow(std::conj(root), n) /
                                                        moment(kBergman, {n});
                }
                // normalize to unit coefficient on z^k and compare
                std::vector<Complex> sec = f.section_coeffs(k, omega, terms);
                Complex scale = symm[static_cast<size_t>(k)];
                REQUIRE(std::abs(scale) > 0.0);
                for (int n = 0; n < terms; ++n) {
                    Complex want = symm[static_cast<size_t>(n)] / scale;
                    CHECK(std::abs(want - sec[static_cast<size_t>(n)]) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("bundle curvature of the power frame") {
    Frame f = power_frame(kBergman, 2);

    CurvatureReport at0 = bundle_curvature(f, 0.0, CurvMethod::Series);
    CHECK(at0.matrix(0, 0).real() == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(at0.matrix(1, 1).real() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(at0.eigenvalues[0] == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(at0.eigenvalues[1] == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(at0.verdict == LatticeVerdict::FiniteDiscrete);

    Complex w = std::sqrt(0.25) * std::exp(Complex(0, 0.4));  // |w|^2 = 0.25
    CurvatureReport rep = bundle_curvature(f, w, CurvMethod::Series);
    CHECK(rep.matrix(0, 0).real() == doctest::Approx(-4.19555555556).epsilon(1e-7));
    CHECK(rep.matrix(0, 0).real() == doctest::Approx(curv0_reference(0.25)).epsilon(1e-9));
    CHECK(rep.matrix(1, 1).real() == doctest::Approx(curv1_reference(0.25)).epsilon(1e-9));

    // the finite-difference route agrees on a small grid
    for (int j = 0; j < 5; ++j) {
        Complex p = 0.65 * j / 4.0 * std::exp(Complex(0, 1.1 * j));
        CurvatureReport fd = bundle_curvature(f, p, CurvMethod::FiniteDifference);
        CurvatureReport sr = bundle_curvature(f, p, CurvMethod::Series);
        CHECK((fd.matrix - sr.matrix).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("power frames of the Hardy module tie at every point") {
    // all three slices carry the metric 1/(1-r), so the curvature matrix is
    // a multiple of the identity and distinctness cannot be asserted
    Frame f = power_frame(KernelSpec::hardy_disk(), 3);
    for (Complex w : {Complex(0.0), Complex(0.35, -0.2)}) {
        double r = std::norm(w);
        CurvatureReport rep = bundle_curvature(f, w, CurvMethod::Series);
        double want = -1.0 / std::pow(1.0 - r, 2);
        for (int i = 0; i < 3; ++i) {
            CHECK(rep.matrix(i, i).real() == doctest::Approx(want).epsilon(1e-9));
            CHECK(rep.multiplicities[static_cast<size_t>(i)] == 3);
        }
        CHECK(rep.verdict == LatticeVerdict::Indeterminate);
    }

    // single-section frame of the Bergman module carries its line curvature
    Frame b1 = power_frame(KernelSpec::weighted_bergman(0.0), 1);
    CurvatureReport rep = bundle_curvature(b1, Complex(0.3, 0.1), CurvMethod::Series);
    double r = std::norm(Complex(0.3, 0.1));
    CHECK(rep.matrix(0, 0).real() == doctest::Approx(-2.0 / std::pow(1.0 - r, 2)).epsilon(1e-9));
}

TEST_CASE("constant frames are flat") {
    MomentSequence mu = MomentSequence::hardy(1);
    std::vector<Frame::Section> sections;
    for (int k = 0; k < 2; ++k)
        sections.push_back([k](Complex, int terms) {
            std::vector<Complex> c(static_cast<size_t>(terms), 0.0);
            c[static_cast<size_t>(k)] = 1.0;
            return c;
        });
    Frame f(std::move(sections), mu);
    CurvatureReport rep = bundle_curvature(f, Complex(0.3, -0.2), CurvMethod::FiniteDifference);
    CHECK(rep.matrix.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(rep.verdict == LatticeVerdict::Indeterminate);  // eigenvalues tie at 0
}

TEST_CASE("frame rescaling preserves the curvature spectrum") {
    Frame f = power_frame(kBergman, 2);
    Eigen::MatrixXcd d(2, 2);
    d << Complex(2.0, 0.5), Complex(0.3, -0.1), Complex(0.0, 0.0), Complex(0.0, 1.5);
    Frame g = f.rescaled(d);
    for (Complex w : {Complex(0.1, 0.2), Complex(-0.35, 0.05)}) {
        CurvatureReport a = bundle_curvature(f, w, CurvMethod::Series);
        CurvatureReport b = bundle_curvature(g, w, CurvMethod::FiniteDifference);
        REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
        for (size_t i = 0; i < a.eigenvalues.size(); ++i)
            CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) <= 1e-6);
    }
}

TEST_CASE("degenerate frames are rejected") {
    MomentSequence mu = MomentSequence::hardy(1);
    std::vector<Frame::Section> sections;
    for (int k = 0; k < 2; ++k)
        sections.push_back([](Complex, int terms) {
            std::vector<Complex> c(static_cast<size_t>(terms), 0.0);
            c[0] = 1.0;  // both sections identical
            return c;
        });
    Frame f(std::move(sections), mu);
    CHECK_THROWS_AS(bundle_curvature(f, Complex(0.1), CurvMethod::FiniteDifference), FrameError);
}

TEST_CASE("reducing curvature table") {
    ReducingReport m2 = reducing_curvatures(kBergman, 2);
    REQUIRE(m2.curvatures.size() == 2);
    CHECK(m2.curvatures[0] == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(m2.curvatures[1] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(m2.verdict == LatticeVerdict::FiniteDiscrete);

    ReducingReport m3 = reducing_curvatures(kBergman, 3);
    REQUIRE(m3.curvatures.size() == 3);
    CHECK(m3.curvatures[0] == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(m3.curvatures[1] == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(m3.curvatures[2] == doctest::Approx(-2.0).epsilon(1e-12));

    ReducingReport m1 = reducing_curvatures(kBergman, 1);
    REQUIRE(m1.curvatures.size() == 1);
    CHECK(m1.curvatures[0] == doctest::Approx(-2.0).epsilon(1e-12));

    for (int m = 2; m <= 6; ++m) {
        ReducingReport rep = reducing_curvatures(kBergman, m);
        CHECK(rep.verdict == LatticeVerdict::FiniteDiscrete);
        for (int k = 0; k < m; ++k)
            CHECK(rep.curvatures[static_cast<size_t>(k)] ==
                  doctest::Approx(-(m + k + 1.0) / (k + 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("orthogonal slices fill out the whole kernel") {
    // sum over k of the slice kernels at (z, w) recovers K(z, w)
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-0.55, 0.55);
    const int terms = 160;
    for (int m = 2; m <= 5; ++m) {
        for (int trial = 0; trial < 20; ++trial) {
            Complex z(u(rng), u(rng)), w(u(rng), u(rng));
            Complex total = 0.0;
            for (int k = 0; k < m; ++k) {
                WeightedShift s = restriction_shift(kBergman, m, k);
                double mu_k = moment(kBergman, {k});
                Complex zw = z * std::conj(w);
                Complex zk = std::pow(zw, k);
                Complex part = 0.0;
                for (int l = 0; m * l + k < terms; ++l) {
                    double b = s.beta(l);
                    part += zk * std::pow(zw, m * l) / (mu_k * b * b);
                }
                total += part;
            }
            Complex full = kernel_eval(kBergman, PointInDomain(z), PointInDomain(w));
            CHECK(std::abs(total - full) <= 1e-9 * (1.0 + std::abs(full)));
        }
    }
}

TEST_CASE("grammian reports hopeless truncation") {
    Frame f = power_frame(kBergman, 2);
    CHECK_THROWS_AS(grammian(f, Complex(0.985, 0.0), 40, 1e-3), TruncationError);
}
