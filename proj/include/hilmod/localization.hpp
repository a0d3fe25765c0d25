#ifndef HILMOD_LOCALIZATION_HPP
#define HILMOD_LOCALIZATION_HPP

#include <Eigen/Dense>
#include <string>

#include "hilmod/kernel_spaces.hpp"

namespace hilmod {

/// A polynomial Hilbert module truncated at a total-degree cap: a filtered
/// monomial basis (times an optional multiplicity), the diagonal Gram
/// matrix from the moment sequence, and the coordinate multiplications.
class TruncatedModule {
public:
    static TruncatedModule full(const KernelSpec& spec, int degree_cap, int multiplicity = 1);
    static TruncatedModule vanishing_at_origin(const KernelSpec& spec, int degree_cap,
                                               int multiplicity = 1);

    int variables() const { return spec_.variables(); }
    int degree_cap() const { return degree_cap_; }
    int multiplicity() const { return multiplicity_; }
    /// Largest degree among the module's monomial generators.
    int generator_degree() const { return generator_degree_; }

    /// Monomial part of the basis (each appears once per copy).
    const std::vector<MultiIndex>& monomials() const { return monomials_; }
    int dim() const { return static_cast<int>(monomials_.size()) * multiplicity_; }
    double gram_diag(int monomial_index) const;
    /// Matrix of M_{z_var} on the truncated monomial basis (one copy);
    /// degree-overflow images are dropped.
    Eigen::MatrixXd mult_matrix(int var) const;

    int monomial_position(const MultiIndex& idx) const;  // -1 if absent
    const KernelSpec& spec() const { return spec_; }

private:
    TruncatedModule(KernelSpec spec, int degree_cap, int multiplicity, bool vanish_at_origin);

    KernelSpec spec_;
    int degree_cap_;
    int multiplicity_;
    int generator_degree_;
    std::vector<MultiIndex> monomials_;
    std::map<MultiIndex, int> position_;
};

struct QuotientDim {
    int value;
    bool exact;  // true only for omega = 0
};

/// dim M / [I_omega^k . M] at finite truncation: exact integer at the
/// origin, truncation-dependent (flagged) elsewhere.
QuotientDim quotient_dim(const TruncatedModule& mod, const std::vector<Complex>& omega, int power);

/// A rational number num/den in lowest terms.
struct Rational {
    long long num = 0;
    long long den = 1;
};

struct HilbertSamuelFit {
    std::vector<long long> dims;   // d_1 .. d_kmax
    std::vector<Rational> poly;    // ascending coefficients of h(k)
    int degree = 0;
    int stable_from = 1;           // first k at which h(k) = d_k onward
    std::string poly_text;
};

/// Computes d_k = dim M/[I_omega^k . M] for k = 1..k_max and fits the
/// unique interpolating polynomial through the stabilized tail by exact
/// finite differences.
HilbertSamuelFit hilbert_samuel(const TruncatedModule& mod, const std::vector<Complex>& omega,
                                int k_max);

/// Submodule of functions vanishing at q; only q = 0 is supported.
TruncatedModule vanishing_submodule(const KernelSpec& spec, int n, int degree_cap,
                                    const std::vector<Complex>& q);

/// Exact evaluation of the fitted polynomial at integer k.
long long hs_poly_eval(const HilbertSamuelFit& fit, long long k);

}  // namespace hilmod

#endif
