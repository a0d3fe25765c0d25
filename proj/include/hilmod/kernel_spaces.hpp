#ifndef HILMOD_KERNEL_SPACES_HPP
#define HILMOD_KERNEL_SPACES_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hilmod/common.hpp"

namespace hilmod {

/// Multi-index of monomial exponents; 1-tuples for disk families.
using MultiIndex = std::vector<int>;

enum class MomentTail { Geometric, Reject };

/// The squared monomial norms mu_alpha = ||z^alpha||^2 of a diagonal
/// (rotation-invariant) kernel Hilbert module. Values are strictly
/// positive and queries are deterministic.
class MomentSequence {
public:
    static MomentSequence hardy(int variables);
    static MomentSequence weighted_bergman(double alpha);
    static MomentSequence drury_arveson(int variables);
    static MomentSequence custom(int variables, std::map<MultiIndex, double> table,
                                 MomentTail tail);

    int variables() const { return variables_; }
    bool table_backed() const { return table_.has_value(); }
    MomentTail tail() const { return tail_; }

    /// mu_alpha; throws ArityError on wrong index length.
    double at(const MultiIndex& idx) const;
    /// One-variable convenience.
    double at(int j) const { return at(MultiIndex{j}); }
    /// mu_{idx + e_axis} / mu_idx, evaluated from the generator rule in
    /// O(1) so that long cumulative products stay accurate.
    double step_ratio(const MultiIndex& idx, int axis) const;

private:
    MomentSequence() = default;

    int variables_ = 1;
    double alpha_ = 0.0;  // weighted Bergman parameter
    enum class Kind { Hardy, Bergman, DruryArveson, Table } kind_ = Kind::Hardy;
    MomentTail tail_ = MomentTail::Reject;
    // 1-variable tables are stored densely (index 0..n-1).
    std::optional<std::vector<double>> table_;
    std::optional<std::map<MultiIndex, double>> multi_table_;
};

enum class KernelFamily { HardyDisk, WeightedBergman, DruryArveson, HardyPolydisk, Custom };

/// A point strictly inside the domain, carrying its own margin delta:
/// the admissible region is ||z|| <= 1 - delta in the domain's norm.
struct PointInDomain {
    std::vector<Complex> coords;
    double margin = kDefaultMargin;

    PointInDomain(Complex z, double m = kDefaultMargin) : coords{z}, margin(m) {}
    PointInDomain(std::vector<Complex> zs, double m = kDefaultMargin)
        : coords(std::move(zs)), margin(m) {}
};

/// A named reproducing-kernel family together with its moment sequence.
class KernelSpec {
public:
    static KernelSpec hardy_disk();
    static KernelSpec weighted_bergman(double alpha);  // alpha > -1
    static KernelSpec drury_arveson(int n);
    static KernelSpec hardy_polydisk(int n);
    static KernelSpec custom(MomentSequence moments);

    KernelFamily family() const { return family_; }
    double alpha() const { return alpha_; }
    int variables() const { return moments_.variables(); }
    const MomentSequence& moments() const { return moments_; }
    bool has_closed_form() const { return family_ != KernelFamily::Custom; }

    /// Domain norm of a point (abs / euclidean / max, per family).
    double domain_norm(const std::vector<Complex>& coords) const;

private:
    KernelSpec(KernelFamily f, double a, MomentSequence m)
        : family_(f), alpha_(a), moments_(std::move(m)) {}

    KernelFamily family_;
    double alpha_;
    MomentSequence moments_;
};

/// mu_idx for the spec's moment sequence.
double moment(const KernelSpec& spec, const MultiIndex& idx);

struct KernelValue {
    Complex value;
    double tail_bound;  // 0 for closed forms
};

/// K(z,w). Closed form when the family has one, else a truncated moment
/// series with a certified geometric tail bound. Hermitian symmetry
/// K(z,w) == conj(K(w,z)) holds bit-exactly.
Complex kernel_eval(const KernelSpec& spec, const PointInDomain& z, const PointInDomain& w,
                    int terms = kDefaultTerms);

/// Same, returning the tail bound instead of throwing on large bounds.
KernelValue kernel_eval_bound(const KernelSpec& spec, const PointInDomain& z,
                              const PointInDomain& w, int terms = kDefaultTerms);

/// Truncated-series evaluation (any diagonal family); the cross-check
/// route for the closed forms.
KernelValue kernel_eval_series(const KernelSpec& spec, const PointInDomain& z,
                               const PointInDomain& w, int terms = kDefaultTerms);

/// Polynomial with complex coefficients, ascending degree.
using PolyCoeffs = std::vector<Complex>;

Complex poly_eval(const PolyCoeffs& p, Complex z);

/// || M_p^* k_w - conj(p(w)) k_w || / || k_w || on the first N monomials.
/// Decays to 0 as N grows for fixed interior w.
double eigenvector_residual(const KernelSpec& spec, const PointInDomain& omega,
                            const PolyCoeffs& p, int truncation);

}  // namespace hilmod

#endif
