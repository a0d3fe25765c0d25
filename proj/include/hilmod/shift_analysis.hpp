#ifndef HILMOD_SHIFT_ANALYSIS_HPP
#define HILMOD_SHIFT_ANALYSIS_HPP

#include <limits>
#include <variant>
#include <vector>

#include "hilmod/kernel_spaces.hpp"

namespace hilmod {

/// w_l identically equal to a constant (Hardy-type shifts).
struct ConstantWeights {
    double value = 1.0;
};

/// w_l = sqrt(mu_{m(l+1)+k} / mu_{ml+k}) for a one-variable diagonal spec:
/// the weights of M_{z^m} restricted to span{ z^{ml+k} }.
struct PowerRestrictionWeights {
    KernelSpec spec;
    int m = 1;
    int k = 0;
};

/// Weights of a coordinate multiplier restricted to the slice
/// base + l*e_axis of a multivariate diagonal spec.
struct SliceWeights {
    KernelSpec spec;
    int axis = 0;
    MultiIndex base;
};

using WeightRule = std::variant<ConstantWeights, PowerRestrictionWeights, SliceWeights>;

/// A bounded unilateral weighted shift e_l -> w_l e_{l+1} with positive
/// weights, given by a closed-form rule or a finite table. Immutable.
class WeightedShift {
public:
    static WeightedShift from_rule(WeightRule rule);
    static WeightedShift from_table(std::vector<double> weights);

    /// w_l; throws TruncationError past the end of a table.
    double weight(int l) const;
    /// beta_l = w_0 ... w_{l-1}, beta_0 = 1.
    double beta(int l) const;

    bool closed_form() const { return rule_.has_value(); }
    const WeightRule* rule() const { return rule_ ? &*rule_ : nullptr; }
    const std::vector<double>* table() const { return table_ ? &*table_ : nullptr; }
    /// Number of directly available weights (INT_MAX for rules).
    int length() const;

private:
    WeightedShift() = default;

    std::optional<WeightRule> rule_;
    std::optional<std::vector<double>> table_;
    std::vector<double> beta_cache_;  // filled at construction
};

/// M_{z^m} restricted to the reducing slice spanned by z^{ml+k}, in its
/// normalized monomial basis.
WeightedShift restriction_shift(const KernelSpec& spec, int m, int k);

/// M_{z_axis} restricted to the cyclic slice through z^base.
WeightedShift coordinate_slice_shift(const KernelSpec& spec, int axis, MultiIndex base);

enum class Equivalence { UnitarilyEquivalent, SimilarNotUnitary, NotSimilar, Inconclusive };

struct SimilarityVerdict {
    Equivalence equivalent = Equivalence::Inconclusive;
    int depth = 0;  // depth reached when Inconclusive
    std::vector<double> coefficients;  // candidate diagonal intertwiner c_l
    double inf_abs = std::numeric_limits<double>::quiet_NaN();
    double sup_abs = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr int kDefaultDepth = 512;
inline constexpr double kWeightTol = 1e-10;

/// Weight-moduli equality test; falls through to similarity analysis
/// when the weights differ.
SimilarityVerdict unitarily_equivalent(const WeightedShift& a, const WeightedShift& b,
                                       int depth = kDefaultDepth, double tol = kWeightTol);

/// Diagonal intertwiner Y e_l = c_l f_l with Y source = target Y, i.e.
/// c_0 = 1 and c_{l+1} = c_l * w_target(l) / w_source(l).
SimilarityVerdict similarity_intertwiner(const WeightedShift& source, const WeightedShift& target,
                                         int depth = kDefaultDepth);

/// Coefficients a_l = 1/beta_l^2 of the metric g(r) = sum a_l r^l,
/// the squared norm of the shift's adjoint eigenvector at radius sqrt(r).
std::vector<double> shift_kernel_metric(const WeightedShift& s, int terms);

}  // namespace hilmod

#endif
