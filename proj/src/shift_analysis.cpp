#include "hilmod/shift_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace hilmod {

namespace {

constexpr int kBetaCacheSize = 2048;

double rule_weight(const WeightRule& rule, int l) {
    if (l < 0) throw Error("weight index must be non-negative");
    return std::visit(
        [&](const auto& r) -> double {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantWeights>) {
                return r.value;
            } else if constexpr (std::is_same_v<R, PowerRestrictionWeights>) {
                // mu_{m(l+1)+k} / mu_{ml+k} as a short product of step ratios
                double ratio = 1.0;
                MultiIndex idx{r.m * l + r.k};
                for (int i = 0; i < r.m; ++i) {
                    ratio *= r.spec.moments().step_ratio(idx, 0);
                    idx[0] += 1;
                }
                return std::sqrt(ratio);
            } else {
                MultiIndex idx = r.base;
                idx[static_cast<size_t>(r.axis)] += l;
                return std::sqrt(r.spec.moments().step_ratio(idx, r.axis));
            }
        },
        rule);
}

}  // namespace

WeightedShift WeightedShift::from_rule(WeightRule rule) {
    WeightedShift s;
    s.rule_ = std::move(rule);
    s.beta_cache_.reserve(kBetaCacheSize);
    s.beta_cache_.push_back(1.0);
    for (int l = 0; l + 1 < kBetaCacheSize; ++l)
        s.beta_cache_.push_back(s.beta_cache_.back() * rule_weight(*s.rule_, l));
    return s;
}

WeightedShift WeightedShift::from_table(std::vector<double> weights) {
    if (weights.empty()) throw Error("weight table is empty");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("weights must be positive and finite");
    WeightedShift s;
    s.beta_cache_.reserve(weights.size() + 1);
    s.beta_cache_.push_back(1.0);
    for (double w : weights) s.beta_cache_.push_back(s.beta_cache_.back() * w);
    s.table_ = std::move(weights);
    return s;
}

double WeightedShift::weight(int l) const {
    if (l < 0) throw Error("weight index must be non-negative");
    if (rule_) return rule_weight(*rule_, l);
    if (l >= static_cast<int>(table_->size()))
        throw TruncationError("weight table exhausted at index " + std::to_string(l),
                              std::numeric_limits<double>::infinity());
    return (*table_)[static_cast<size_t>(l)];
}

double WeightedShift::beta(int l) const {
    if (l < 0) throw Error("beta index must be non-negative");
    if (l < static_cast<int>(beta_cache_.size())) return beta_cache_[static_cast<size_t>(l)];
    double b = beta_cache_.back();
    for (int j = static_cast<int>(beta_cache_.size()) - 1; j < l; ++j) b *= weight(j);
    return b;
}

int WeightedShift::length() const {
    return rule_ ? std::numeric_limits<int>::max() : static_cast<int>(table_->size());
}

WeightedShift restriction_shift(const KernelSpec& spec, int m, int k) {
    if (spec.variables() != 1) throw ArityError("restriction shift requires one variable");
    if (m < 1 || k < 0 || k >= m) throw Error("need m >= 1 and 0 <= k < m");
    if (spec.family() == KernelFamily::HardyDisk)
        return WeightedShift::from_rule(ConstantWeights{1.0});
    return WeightedShift::from_rule(PowerRestrictionWeights{spec, m, k});
}

WeightedShift coordinate_slice_shift(const KernelSpec& spec, int axis, MultiIndex base) {
    if (axis < 0 || axis >= spec.variables()) throw ArityError("slice axis out of range");
    if (static_cast<int>(base.size()) != spec.variables())
        throw ArityError("slice base arity mismatch");
    return WeightedShift::from_rule(SliceWeights{spec, axis, std::move(base)});
}

namespace {

// Indices probed to compare closed-form weight rules beyond the explicit
// comparison window.
const int kCheckpoints[] = {1024, 4096, 16384, 65536, 262144, 1048576};

bool checkpoints_agree(const WeightedShift& a, const WeightedShift& b, double tol) {
    for (int l : kCheckpoints)
        if (std::abs(a.weight(l) - b.weight(l)) > tol) return false;
    return true;
}

bool same_rule(const WeightRule& a, const WeightRule& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ca = std::get_if<ConstantWeights>(&a))
        return ca->value == std::get<ConstantWeights>(b).value;
    if (const auto* pa = std::get_if<PowerRestrictionWeights>(&a)) {
        const auto& pb = std::get<PowerRestrictionWeights>(b);
        return pa->m == pb.m && pa->k == pb.k && pa->spec.family() == pb.spec.family() &&
               pa->spec.alpha() == pb.spec.alpha();
    }
    const auto& sa = std::get<SliceWeights>(a);
    const auto& sb = std::get<SliceWeights>(b);
    return sa.axis == sb.axis && sa.base == sb.base && sa.spec.family() == sb.spec.family() &&
           sa.spec.alpha() == sb.spec.alpha();
}

// Ratio-limit test on c_l^2 for closed-form rules. Returns +1 / -1 when
// the intertwiner provably diverges to infinity / zero, 0 when the
// product converges.
int divergence_sign(const WeightedShift& source, const WeightedShift& target) {
    double g_last = 0.0;
    std::vector<double> t;
    for (int l : kCheckpoints) {
        double r = target.weight(l) / source.weight(l);
        double g = r * r - 1.0;
        g_last = g;
        t.push_back(static_cast<double>(l) * g);
    }
    if (std::abs(g_last) > 1e-4) return g_last > 0 ? 1 : -1;  // geometric divergence
    // Power-law test: l*(r^2 - 1) -> a != 0 means c^2 ~ l^a.
    double a = t.back();
    bool stable = true;
    for (size_t j = t.size() - 3; j + 1 < t.size(); ++j) {
        if (t[j] == 0.0 || t[j + 1] / t[j] < 0.5 || t[j + 1] / t[j] > 2.0) stable = false;
    }
    if (std::abs(a) > 1e-2 && stable) return a > 0 ? 1 : -1;
    return 0;
}

SimilarityVerdict bounded_verdict(std::vector<double> c, int depth_reached, bool certified) {
    SimilarityVerdict v;
    v.coefficients = std::move(c);
    auto [lo, hi] = std::minmax_element(v.coefficients.begin(), v.coefficients.end());
    v.inf_abs = *lo;
    v.sup_abs = *hi;
    v.depth = depth_reached;

    bool unitary = true;
    for (double x : v.coefficients)
        if (std::abs(x - 1.0) > kWeightTol) unitary = false;

    if (!certified) {
        v.equivalent = Equivalence::Inconclusive;
        return v;
    }
    v.equivalent = unitary ? Equivalence::UnitarilyEquivalent : Equivalence::SimilarNotUnitary;
    return v;
}

}  // namespace

SimilarityVerdict similarity_intertwiner(const WeightedShift& source, const WeightedShift& target,
                                         int depth) {
    if (depth < 2) throw Error("intertwiner depth must be at least 2");
    int avail = std::min({depth, source.length(), target.length()});
    std::vector<double> c;
    c.reserve(static_cast<size_t>(avail));
    c.push_back(1.0);
    for (int l = 0; l + 1 < avail; ++l)
        c.push_back(c.back() * target.weight(l) / source.weight(l));

    bool closed = source.closed_form() && target.closed_form();
    if (closed) {
        int sign = divergence_sign(source, target);
        if (sign != 0) {
            SimilarityVerdict v;
            v.equivalent = Equivalence::NotSimilar;
            v.coefficients = std::move(c);
            auto [lo, hi] = std::minmax_element(v.coefficients.begin(), v.coefficients.end());
            v.inf_abs = sign < 0 ? 0.0 : *lo;
            v.sup_abs = sign > 0 ? std::numeric_limits<double>::infinity() : *hi;
            v.depth = depth;
            return v;
        }
        // Convergent product: extend it and certify a Cauchy tail on the
        // 1/l-extrapolated values (plain differences decay too slowly).
        const int lmax = 65536;
        double c_ext = c.back();
        double run_min = c_ext, run_max = c_ext;
        double at_q1 = 0.0, at_q2 = 0.0;
        for (int l = avail - 1; l + 1 < lmax; ++l) {
            c_ext *= target.weight(l) / source.weight(l);
            run_min = std::min(run_min, c_ext);
            run_max = std::max(run_max, c_ext);
            if (l + 1 == lmax / 4) at_q1 = c_ext;
            if (l + 1 == lmax / 2) at_q2 = c_ext;
        }
        double extrap_prev = 2.0 * at_q2 - at_q1;
        double extrap_last = 2.0 * c_ext - at_q2;
        bool cauchy =
            std::abs(extrap_last - extrap_prev) <= 1e-6 * std::max(1.0, std::abs(extrap_last));
        if (!cauchy) return bounded_verdict(std::move(c), depth, false);
        SimilarityVerdict v = bounded_verdict(std::move(c), depth, true);
        v.inf_abs = std::min(v.inf_abs, run_min);
        v.sup_abs = std::max(v.sup_abs, run_max);
        return v;
    }

    // Table-backed: judge stability over the last quarter of the range.
    if (avail < 64) return bounded_verdict(std::move(c), avail, false);
    double ref = c.back();
    double spread = 0.0;
    for (size_t i = c.size() - c.size() / 4; i < c.size(); ++i)
        spread = std::max(spread, std::abs(c[i] - ref));
    bool stable = spread <= 1e-6 * std::max(1.0, std::abs(ref)) && ref > 0.0;
    return bounded_verdict(std::move(c), avail, stable);
}

SimilarityVerdict unitarily_equivalent(const WeightedShift& a, const WeightedShift& b, int depth,
                                       double tol) {
    if (depth < 1) throw Error("comparison depth must be at least 1");
    int n_cmp = std::min({depth, a.length(), b.length()});
    for (int l = 0; l < n_cmp; ++l) {
        if (std::abs(a.weight(l) - b.weight(l)) > tol)
            return similarity_intertwiner(a, b, std::max(depth, 2));
    }
    bool tails_match = false;
    if (a.closed_form() && b.closed_form()) {
        tails_match = same_rule(*a.rule(), *b.rule()) || checkpoints_agree(a, b, tol);
    } else if (!a.closed_form() && !b.closed_form()) {
        tails_match = *a.table() == *b.table();
    }
    if (n_cmp < depth && !tails_match) {
        SimilarityVerdict v;
        v.equivalent = Equivalence::Inconclusive;
        v.depth = n_cmp;
        v.coefficients.assign(static_cast<size_t>(n_cmp), 1.0);
        v.inf_abs = v.sup_abs = 1.0;
        return v;
    }
    if (tails_match) {
        SimilarityVerdict v;
        v.equivalent = Equivalence::UnitarilyEquivalent;
        v.depth = depth;
        v.coefficients.assign(static_cast<size_t>(std::min(depth, n_cmp)), 1.0);
        v.inf_abs = v.sup_abs = 1.0;
        return v;
    }
    SimilarityVerdict v;
    v.equivalent = Equivalence::Inconclusive;
    v.depth = n_cmp;
    v.coefficients.assign(static_cast<size_t>(n_cmp), 1.0);
    v.inf_abs = v.sup_abs = 1.0;
    return v;
}

std::vector<double> shift_kernel_metric(const WeightedShift& s, int terms) {
    if (terms < 2) throw Error("metric needs at least 2 terms");
    std::vector<double> a(static_cast<size_t>(terms));
    for (int l = 0; l < terms; ++l) {
        double b = s.beta(l);
        a[static_cast<size_t>(l)] = 1.0 / (b * b);
    }
    return a;
}

}  // namespace hilmod
