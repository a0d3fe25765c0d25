#ifndef HILMOD_MODEL_THEORY_HPP
#define HILMOD_MODEL_THEORY_HPP

#include <Eigen/Dense>

#include "hilmod/common.hpp"
#include "hilmod/kernel_spaces.hpp"

namespace hilmod {

/// A d x d contraction with cached defect operators D_T = (I-T*T)^{1/2},
/// D_{T*} = (I-TT*)^{1/2} and orthonormal bases of their ranges.
class FiniteContraction {
public:
    explicit FiniteContraction(Eigen::MatrixXcd t);

    int dim() const { return static_cast<int>(t_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return t_; }
    const Eigen::MatrixXcd& defect() const { return d_t_; }
    const Eigen::MatrixXcd& defect_adjoint() const { return d_tstar_; }
    int defect_rank() const { return static_cast<int>(basis_t_.cols()); }
    int defect_adjoint_rank() const { return static_cast<int>(basis_tstar_.cols()); }
    /// d x rank matrices with orthonormal columns spanning the defect spaces.
    const Eigen::MatrixXcd& defect_basis() const { return basis_t_; }
    const Eigen::MatrixXcd& defect_adjoint_basis() const { return basis_tstar_; }

private:
    Eigen::MatrixXcd t_, d_t_, d_tstar_, basis_t_, basis_tstar_;
};

/// Which operator acts between the resolvent and the defect embedding.
/// WithDefectFactor is the model-theoretic reading
///   theta(z) = -T + z D_{T*} (I - z T*)^{-1} D_T  restricted to the defects;
/// WithoutDefectFactor omits the trailing D_T and is kept for comparison.
enum class CharFnForm { WithDefectFactor, WithoutDefectFactor };

struct CharFnSample {
    Complex z;
    Eigen::MatrixXcd theta;  // defect-adjoint coordinates x defect coordinates
};

/// Characteristic function sample at z, |z| < 1, expressed in the stored
/// defect bases (canonical only up to constant unitaries).
CharFnSample char_function(const FiniteContraction& t, Complex z,
                           CharFnForm form = CharFnForm::WithDefectFactor);

/// A scalar holomorphic function given as a polynomial or a ratio of two.
struct HoloFunction {
    PolyCoeffs num;
    PolyCoeffs den{Complex(1.0)};
};

/// Localization of the multiplication module map at omega: returns
/// theta(omega).
Complex localize_multiplier(const HoloFunction& theta, Complex omega);

enum class MapObstruction { NoNonzeroMap, Unobstructed };

struct RatioResult {
    double ratio;
    MapObstruction verdict;
};

/// Kernel-vector norm ratio ||gamma^beta_w|| / ||gamma^alpha_w|| between
/// weighted Bergman modules, with the quasi-similarity obstruction verdict.
RatioResult quasi_similarity_ratio(double alpha, double beta, Complex omega,
                                   double margin = kDefaultMargin);

}  // namespace hilmod

#endif
