#include "hilmod/model_theory.hpp"

#include <algorithm>
#include <cmath>

namespace hilmod {

namespace {

constexpr double kNormSlack = 1e-12;
constexpr double kDefectCutoff = 1e-10;
constexpr double kEigenvalueFloor = -1e-12;

struct DefectData {
    Eigen::MatrixXcd root;   // Hermitian square root
    Eigen::MatrixXcd basis;  // orthonormal range basis, d x rank
};

// Hermitian square root of I - A via eigendecomposition, with the range
// basis ordered by descending eigenvalue (deterministic tie-break and
// phase fixing).
DefectData defect_of(const Eigen::MatrixXcd& gram) {
    const int d = static_cast<int>(gram.rows());
    Eigen::MatrixXcd g = (gram + gram.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    Eigen::VectorXd lambda = es.eigenvalues();
    for (int i = 0; i < d; ++i) {
        if (lambda(i) < kEigenvalueFloor)
            throw ContractionError("defect operator has a negative eigenvalue: " +
                                   std::to_string(lambda(i)));
        if (lambda(i) < 0.0) lambda(i) = 0.0;
    }

    // order indices by descending eigenvalue, then lexicographically on the
    // eigenvector components
    std::vector<int> order(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) order[static_cast<size_t>(i)] = i;
    auto vec_less = [&](int a, int b) {
        for (int r = 0; r < d; ++r) {
            Complex x = es.eigenvectors()(r, a), y = es.eigenvectors()(r, b);
            if (x.real() != y.real()) return x.real() < y.real();
            if (x.imag() != y.imag()) return x.imag() < y.imag();
        }
        return false;
    };
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (lambda(a) != lambda(b)) return lambda(a) > lambda(b);
        return vec_less(a, b);
    });

    DefectData out;
    out.root = Eigen::MatrixXcd::Zero(d, d);
    std::vector<int> kept;
    for (int idx : order) {
        out.root += std::sqrt(lambda(idx)) * es.eigenvectors().col(idx) *
                    es.eigenvectors().col(idx).adjoint();
        if (lambda(idx) > kDefectCutoff) kept.push_back(idx);
    }
    out.basis = Eigen::MatrixXcd(d, static_cast<int>(kept.size()));
    for (int c = 0; c < static_cast<int>(kept.size()); ++c) {
        Eigen::VectorXcd v = es.eigenvectors().col(kept[static_cast<size_t>(c)]);
        // fix the phase: largest-modulus entry becomes positive real
        int arg_max = 0;
        for (int r = 1; r < d; ++r)
            if (std::abs(v(r)) > std::abs(v(arg_max))) arg_max = r;
        if (std::abs(v(arg_max)) > 0.0) v *= std::conj(v(arg_max)) / std::abs(v(arg_max));
        out.basis.col(c) = v;
    }
    return out;
}

}  // namespace

FiniteContraction::FiniteContraction(Eigen::MatrixXcd t) : t_(std::move(t)) {
    if (t_.rows() != t_.cols() || t_.rows() < 1) throw Error("contraction must be square");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t_);
    double norm = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    if (norm > 1.0 + kNormSlack)
        throw ContractionError("operator norm " + std::to_string(norm) + " exceeds 1");
    const int d = dim();
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    DefectData dt = defect_of(id - t_.adjoint() * t_);
    DefectData dts = defect_of(id - t_ * t_.adjoint());
    d_t_ = dt.root;
    d_tstar_ = dts.root;
    basis_t_ = dt.basis;
    basis_tstar_ = dts.basis;
}

CharFnSample char_function(const FiniteContraction& t, Complex z, CharFnForm form) {
    if (!(std::abs(z) < 1.0)) throw DomainError("characteristic function needs |z| < 1");
    const int d = t.dim();
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd resolvent = (id - z * t.matrix().adjoint()).fullPivLu().solve(id);
    Eigen::MatrixXcd core = -t.matrix() + z * t.defect_adjoint() * resolvent *
                                              (form == CharFnForm::WithDefectFactor ? t.defect() : id);
    CharFnSample sample;
    sample.z = z;
    sample.theta = t.defect_adjoint_basis().adjoint() * core * t.defect_basis();
    if (form == CharFnForm::WithDefectFactor && sample.theta.size() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sample.theta);
        if (svd.singularValues()(0) > 1.0 + 1e-8)
            throw Error("characteristic function lost contractivity numerically");
    }
    return sample;
}

Complex localize_multiplier(const HoloFunction& theta, Complex omega) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("localization point must satisfy |omega| < 1");
    if (theta.num.empty() || theta.den.empty()) throw Error("empty function data");
    Complex den = poly_eval(theta.den, omega);
    if (std::abs(den) < 1e-300) throw DomainError("function denominator vanishes at this point");
    return poly_eval(theta.num, omega) / den;
}

RatioResult quasi_similarity_ratio(double alpha, double beta, Complex omega, double margin) {
    if (!(alpha > -1.0) || !(beta > -1.0)) throw Error("weights must exceed -1");
    if (!(margin > 0.0 && margin < 1.0)) throw DomainError("margin must lie in (0,1)");
    if (std::abs(omega) > 1.0 - margin) throw DomainError("point violates the domain margin");
    // ||gamma^a_w||^2 = (1-|w|^2)^{-(2+a)}, so the ratio carries exponent
    // (alpha-beta)/2.
    double ratio = std::pow(1.0 - std::norm(omega), (alpha - beta) / 2.0);
    return {ratio, alpha < beta ? MapObstruction::NoNonzeroMap : MapObstruction::Unobstructed};
}

}  // namespace hilmod
