#ifndef HILMOD_BUNDLE_GEOMETRY_HPP
#define HILMOD_BUNDLE_GEOMETRY_HPP

#include <Eigen/Dense>
#include <functional>

#include "hilmod/shift_analysis.hpp"

namespace hilmod {

/// A positive radial metric g(r), r = |omega|^2, given as a power series
/// with non-negative coefficients and/or a closed form with two declared
/// derivatives. Curvature only sees log g, so overall scale is irrelevant.
class RadialMetric {
public:
    static RadialMetric from_coefficients(std::vector<double> a);
    static RadialMetric from_generator(std::function<double(int)> a, int terms = kDefaultTerms);
    static RadialMetric closed_form(std::function<double(double)> g, std::function<double(double)> g1,
                                    std::function<double(double)> g2);
    static RadialMetric hardy();                  // 1/(1-r)
    static RadialMetric bergman(double alpha);    // (1-r)^{-2-alpha}
    static RadialMetric constant(double c = 1.0); // flat
    static RadialMetric from_shift(const WeightedShift& s, int terms = kDefaultTerms);

    bool has_series() const { return static_cast<bool>(coeff_); }
    bool has_closed_form() const { return static_cast<bool>(g_); }
    int series_terms() const { return terms_; }
    double coefficient(int l) const;
    /// Estimated bound on a_{l+1}/a_l over the series (convergence certificate).
    double ratio_certificate() const { return ratio_cert_; }

    struct Jet {
        double g, g1, g2;
        double tail_rel;  // relative series tail bound (0 for closed form)
    };
    Jet jet_series(double r, int terms = 0) const;  // 0: construction default
    Jet jet_closed(double r) const;

    RadialMetric scaled(double c) const;

private:
    RadialMetric() = default;

    std::function<double(int)> coeff_;
    int terms_ = kDefaultTerms;
    double ratio_cert_ = 0.0;
    std::function<double(double)> g_, g1_, g2_;
};

enum class CurvMethod { Series, FiniteDifference, ClosedForm };

struct FDOptions {
    double step = 1e-3;      // of the unit domain radius
    int richardson = 1;      // extrapolation levels (0 = plain 2nd order)
};

/// K(omega) = -d_omega d_conj(omega) log g(|omega|^2).
double line_curvature(const RadialMetric& g, Complex omega, CurvMethod method = CurvMethod::Series,
                      const FDOptions& fd = {}, double margin = kDefaultMargin);

/// h(omega) = (-K(omega))^{-1/2}; defined only where K < 0.
double metric_h(const RadialMetric& g, Complex omega, double margin = kDefaultMargin);

/// An ordered list of anti-holomorphic section evaluators over the disk.
/// A section maps omega to its ambient monomial coefficients (index =
/// exponent, length = requested term count).
class Frame {
public:
    using Section = std::function<std::vector<Complex>(Complex, int)>;

    Frame(std::vector<Section> sections, MomentSequence ambient);

    int rank() const { return static_cast<int>(sections_.size()); }
    const MomentSequence& ambient() const { return ambient_; }
    std::vector<Complex> section_coeffs(int i, Complex omega, int terms) const;

    /// Per-section radial coefficient generators for frames whose Grammian
    /// is diagonal with radial entries (enables the exact series route).
    void declare_diagonal_radial(std::vector<std::function<double(int)>> diag_coeffs);
    bool diagonal_radial() const { return !diag_coeffs_.empty(); }
    const std::function<double(int)>& diag_coeff(int i) const;

    /// Constant change of frame: new sections nu'_j = sum_i D(i,j) nu_i.
    Frame rescaled(const Eigen::MatrixXcd& d) const;

private:
    std::vector<Section> sections_;
    MomentSequence ambient_;
    std::vector<std::function<double(int)>> diag_coeffs_;
};

/// Grammian H_ij(omega) = <nu_j(omega), nu_i(omega)>; Hermitian by
/// construction. Throws TruncationError when the series tail cannot be
/// certified small.
Eigen::MatrixXcd grammian(const Frame& f, Complex omega, int terms = kDefaultTerms,
                          double margin = kDefaultMargin);

/// The orthogonal power frame of M_{z^m}: section k is supported on
/// exponents congruent to k mod m, with unit coefficient on z^k.
Frame power_frame(const KernelSpec& spec, int m);

enum class LatticeVerdict { FiniteDiscrete, Indeterminate };

struct CurvatureReport {
    Complex omega;
    Eigen::MatrixXcd matrix;
    std::vector<double> eigenvalues;    // ascending
    std::vector<int> multiplicities;    // cluster size per eigenvalue
    LatticeVerdict verdict = LatticeVerdict::Indeterminate;
};

/// Eigenvalue resolution below which distinctness is not asserted.
inline constexpr double kEigResolution = 1e-6;

/// K(omega) = -d_conj(omega) (H^{-1} d_omega H), with the finite-difference
/// and exact-series routes cross-checked against each other whenever both
/// are available.
CurvatureReport bundle_curvature(const Frame& f, Complex omega,
                                 CurvMethod method = CurvMethod::FiniteDifference,
                                 const FDOptions& fd = {}, int terms = kDefaultTerms,
                                 double margin = kDefaultMargin, double cross_tol = 1e-6);

struct ReducingReport {
    std::vector<double> curvatures;  // curvature at 0 of each slice k = 0..m-1
    LatticeVerdict verdict = LatticeVerdict::Indeterminate;
};

/// Curvature at 0 of each reducing slice of M_{z^m}; the lattice verdict
/// follows from pairwise distinctness of the values.
ReducingReport reducing_curvatures(const KernelSpec& spec, int m);

}  // namespace hilmod

#endif
