#include "hilmod/kernel_spaces.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace hilmod {

namespace {

void check_arity(int got, int want) {
    if (got != want)
        throw ArityError("multi-index has " + std::to_string(got) + " entries, space has " +
                         std::to_string(want) + " variable(s)");
}

void check_nonnegative(const MultiIndex& idx) {
    for (int j : idx)
        if (j < 0) throw ArityError("multi-index entries must be non-negative");
}

// Multinomial |alpha|! / alpha! as a deterministic product.
double multinomial(const MultiIndex& idx) {
    double result = 1.0;
    int total = 0;
    for (int part : idx) {
        for (int i = 1; i <= part; ++i) {
            ++total;
            result *= static_cast<double>(total) / static_cast<double>(i);
        }
    }
    return result;
}

}  // namespace

MomentSequence MomentSequence::hardy(int variables) {
    MomentSequence m;
    m.variables_ = variables;
    m.kind_ = Kind::Hardy;
    return m;
}

MomentSequence MomentSequence::weighted_bergman(double alpha) {
    if (!(alpha > -1.0)) throw Error("weighted Bergman parameter must exceed -1");
    MomentSequence m;
    m.variables_ = 1;
    m.alpha_ = alpha;
    m.kind_ = Kind::Bergman;
    return m;
}

MomentSequence MomentSequence::drury_arveson(int variables) {
    if (variables < 1) throw Error("variable count must be positive");
    MomentSequence m;
    m.variables_ = variables;
    m.kind_ = Kind::DruryArveson;
    return m;
}

MomentSequence MomentSequence::custom(int variables, std::map<MultiIndex, double> table,
                                      MomentTail tail) {
    if (variables < 1) throw Error("variable count must be positive");
    if (table.empty()) throw Error("moment table is empty");
    for (const auto& [idx, value] : table) {
        if (static_cast<int>(idx.size()) != variables)
            throw ArityError("moment table index arity mismatch");
        check_nonnegative(idx);
        if (!(value > 0.0) || !std::isfinite(value))
            throw Error("moment values must be strictly positive and finite");
    }
    MomentSequence m;
    m.variables_ = variables;
    m.kind_ = Kind::Table;
    m.tail_ = tail;
    if (variables == 1) {
        int max_idx = table.rbegin()->first[0];
        std::vector<double> dense(static_cast<size_t>(max_idx) + 1, -1.0);
        for (const auto& [idx, value] : table) dense[static_cast<size_t>(idx[0])] = value;
        for (double v : dense)
            if (v < 0.0) throw Error("moment table must cover indices 0..max contiguously");
        m.table_ = std::move(dense);
    } else {
        if (tail == MomentTail::Geometric)
            throw Error("geometric moment tails are supported for one variable only");
        m.multi_table_ = std::move(table);
    }
    return m;
}

double MomentSequence::at(const MultiIndex& idx) const {
    check_arity(static_cast<int>(idx.size()), variables_);
    check_nonnegative(idx);
    switch (kind_) {
        case Kind::Hardy:
            return 1.0;
        case Kind::Bergman: {
            // mu_{n+1} = mu_n (n+1)/(n+2+alpha), mu_0 = 1.
            double mu = 1.0;
            for (int n = 0; n < idx[0]; ++n) mu *= (n + 1) / (n + 2 + alpha_);
            return mu;
        }
        case Kind::DruryArveson:
            return 1.0 / multinomial(idx);
        case Kind::Table: {
            if (table_) {
                int j = idx[0];
                int n = static_cast<int>(table_->size());
                if (j < n) return (*table_)[static_cast<size_t>(j)];
                if (tail_ == MomentTail::Reject)
                    throw TruncationError("moment table exhausted at index " + std::to_string(j),
                                          std::numeric_limits<double>::infinity());
                // Geometric extension from the last tabulated ratio.
                double last = (*table_)[static_cast<size_t>(n - 1)];
                double ratio = n >= 2 ? last / (*table_)[static_cast<size_t>(n - 2)] : 1.0;
                double mu = last;
                for (int i = n; i <= j; ++i) mu *= ratio;
                return mu;
            }
            auto it = multi_table_->find(idx);
            if (it == multi_table_->end())
                throw TruncationError("moment table has no entry for the requested index",
                                      std::numeric_limits<double>::infinity());
            return it->second;
        }
    }
    throw Error("unreachable");
}

double MomentSequence::step_ratio(const MultiIndex& idx, int axis) const {
    check_arity(static_cast<int>(idx.size()), variables_);
    check_nonnegative(idx);
    if (axis < 0 || axis >= variables_) throw ArityError("axis out of range");
    switch (kind_) {
        case Kind::Hardy:
            return 1.0;
        case Kind::Bergman: {
            int n = idx[0];
            return (n + 1) / (n + 2 + alpha_);
        }
        case Kind::DruryArveson: {
            int total = 0;
            for (int j : idx) total += j;
            return (idx[static_cast<size_t>(axis)] + 1.0) / (total + 1.0);
        }
        case Kind::Table: {
            MultiIndex up = idx;
            up[static_cast<size_t>(axis)] += 1;
            return at(up) / at(idx);
        }
    }
    throw Error("unreachable");
}

KernelSpec KernelSpec::hardy_disk() {
    return KernelSpec(KernelFamily::HardyDisk, 0.0, MomentSequence::hardy(1));
}

KernelSpec KernelSpec::weighted_bergman(double alpha) {
    return KernelSpec(KernelFamily::WeightedBergman, alpha, MomentSequence::weighted_bergman(alpha));
}

KernelSpec KernelSpec::drury_arveson(int n) {
    return KernelSpec(KernelFamily::DruryArveson, 0.0, MomentSequence::drury_arveson(n));
}

KernelSpec KernelSpec::hardy_polydisk(int n) {
    if (n < 1) throw Error("variable count must be positive");
    return KernelSpec(KernelFamily::HardyPolydisk, 0.0, MomentSequence::hardy(n));
}

KernelSpec KernelSpec::custom(MomentSequence moments) {
    return KernelSpec(KernelFamily::Custom, 0.0, std::move(moments));
}

double KernelSpec::domain_norm(const std::vector<Complex>& coords) const {
    switch (family_) {
        case KernelFamily::DruryArveson: {
            double s = 0.0;
            for (Complex c : coords) s += std::norm(c);
            return std::sqrt(s);
        }
        case KernelFamily::HardyPolydisk: {
            double s = 0.0;
            for (Complex c : coords) s = std::max(s, std::abs(c));
            return s;
        }
        default:
            return coords.empty() ? 0.0 : std::abs(coords[0]);
    }
}

double moment(const KernelSpec& spec, const MultiIndex& idx) { return spec.moments().at(idx); }

namespace {

void check_point(const KernelSpec& spec, const PointInDomain& p, const char* which) {
    check_arity(static_cast<int>(p.coords.size()), spec.variables());
    if (!(p.margin > 0.0 && p.margin < 1.0))
        throw DomainError("domain margin must lie in (0,1)");
    double n = spec.domain_norm(p.coords);
    if (n > 1.0 - p.margin)
        throw DomainError(std::string(which) + " point violates the domain margin: |" + which +
                          "| = " + std::to_string(n) + " > " + std::to_string(1.0 - p.margin));
}

// Strict deterministic order on coordinate vectors (sign of zero included),
// used to canonicalize Hermitian-pair evaluation.
bool coords_less(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    auto key = [](double x) {
        // signbit splits -0.0 from +0.0 so both orders take the same branch
        return std::make_pair(x, !std::signbit(x));
    };
    for (size_t i = 0; i < a.size(); ++i) {
        auto ar = key(a[i].real()), br = key(b[i].real());
        if (ar != br) return ar < br;
        auto ai = key(a[i].imag()), bi = key(b[i].imag());
        if (ai != bi) return ai < bi;
    }
    return false;
}

constexpr double kTailRelTol = 1e-9;

// One-variable truncated series sum_n u^n / mu_n, ascending degree with
// compensated summation, plus a geometric tail certificate.
KernelValue series_1var(const MomentSequence& mu, Complex u, int terms) {
    KahanSumC sum;
    double prev_mu = 0.0;
    double ratio_sup = 0.0;  // sup of mu_n / mu_{n+1} over the trailing window
    Complex un = 1.0;
    int n = 0;
    for (; n < terms; ++n) {
        double m;
        try {
            m = mu.at(n);
        } catch (const TruncationError&) {
            break;  // table exhausted under Reject: finite space, zero tail
        }
        sum.add(un / m);
        un *= u;
        if (n > terms / 2) ratio_sup = std::max(ratio_sup, prev_mu / m);
        prev_mu = m;
    }
    double tail = 0.0;
    bool truncated = false;
    try {
        mu.at(n);
        truncated = true;
    } catch (const TruncationError&) {
        truncated = false;
    }
    if (truncated && std::abs(u) > 0.0) {
        double rho = std::abs(u) * std::max(ratio_sup, 1.0);
        if (rho >= 1.0)
            throw TruncationError("moment series does not certify convergence at this point",
                                  std::numeric_limits<double>::infinity());
        tail = (std::abs(un) / prev_mu) * 1.0 / (1.0 - rho);
    }
    return {sum.value(), tail};
}

// Enumerate multi-indices of total degree d (lexicographic), for the
// multivariate series route.
void for_each_index_of_degree(int vars, int degree, MultiIndex& scratch, size_t pos,
                              const std::function<void(const MultiIndex&)>& fn) {
    if (pos + 1 == scratch.size()) {
        scratch[pos] = degree;
        fn(scratch);
        return;
    }
    for (int j = degree; j >= 0; --j) {
        scratch[pos] = j;
        for_each_index_of_degree(vars, degree - j, scratch, pos + 1, fn);
    }
}

KernelValue series_multi(const MomentSequence& mu, const std::vector<Complex>& z,
                         const std::vector<Complex>& w, int max_degree) {
    int vars = mu.variables();
    if (mu.table_backed()) {
        // Finite table under Reject: the space is spanned by the tabulated
        // monomials, so the sum is exact.
        KahanSumC sum;
        MultiIndex scratch(static_cast<size_t>(vars));
        for (int d = 0; d <= max_degree; ++d) {
            for_each_index_of_degree(vars, d, scratch, 0, [&](const MultiIndex& idx) {
                double m;
                try {
                    m = mu.at(idx);
                } catch (const TruncationError&) {
                    return;
                }
                Complex term = 1.0;
                for (int v = 0; v < vars; ++v)
                    term *= std::pow(z[static_cast<size_t>(v)], idx[static_cast<size_t>(v)]) *
                            std::pow(std::conj(w[static_cast<size_t>(v)]), idx[static_cast<size_t>(v)]);
                sum.add(term / m);
            });
        }
        return {sum.value(), 0.0};
    }
    // Closed-form moment rules: sum by ascending total degree and certify
    // the tail from the decay of per-degree block sums.
    KahanSumC sum;
    MultiIndex scratch(static_cast<size_t>(vars));
    double block = 0.0, prev_block = 0.0, growth = 0.0;
    for (int d = 0; d <= max_degree; ++d) {
        KahanSumC block_sum;
        double block_abs = 0.0;
        for_each_index_of_degree(vars, d, scratch, 0, [&](const MultiIndex& idx) {
            Complex term = 1.0;
            for (int v = 0; v < vars; ++v)
                term *= std::pow(z[static_cast<size_t>(v)], idx[static_cast<size_t>(v)]) *
                        std::pow(std::conj(w[static_cast<size_t>(v)]), idx[static_cast<size_t>(v)]);
            Complex t = term / mu.at(idx);
            block_sum.add(t);
            block_abs += std::abs(t);
        });
        sum.add(block_sum.value());
        prev_block = block;
        block = block_abs;
        if (d > max_degree / 2 && prev_block > 0.0) growth = std::max(growth, block / prev_block);
    }
    double tail = 0.0;
    if (block > 0.0) {
        if (growth >= 1.0)
            throw TruncationError("moment series does not certify convergence at this point",
                                  std::numeric_limits<double>::infinity());
        tail = block * growth / (1.0 - growth);
    }
    return {sum.value(), tail};
}

KernelValue eval_impl(const KernelSpec& spec, const PointInDomain& z, const PointInDomain& w,
                      int terms, bool force_series) {
    if (terms < 1) throw Error("terms must be at least 1");
    check_point(spec, z, "z");
    check_point(spec, w, "w");

    // Canonical evaluation order makes Hermitian symmetry bit-exact.
    if (coords_less(w.coords, z.coords)) {
        KernelValue v = eval_impl(spec, w, z, terms, force_series);
        return {std::conj(v.value), v.tail_bound};
    }

    if (!force_series) {
        switch (spec.family()) {
            case KernelFamily::HardyDisk:
                return {1.0 / (1.0 - z.coords[0] * std::conj(w.coords[0])), 0.0};
            case KernelFamily::WeightedBergman: {
                Complex u = z.coords[0] * std::conj(w.coords[0]);
                return {std::pow(1.0 - u, Complex(-2.0 - spec.alpha())), 0.0};
            }
            case KernelFamily::DruryArveson: {
                Complex inner = 0.0;
                for (size_t i = 0; i < z.coords.size(); ++i)
                    inner += z.coords[i] * std::conj(w.coords[i]);
                return {1.0 / (1.0 - inner), 0.0};
            }
            case KernelFamily::HardyPolydisk: {
                Complex prod = 1.0;
                for (size_t i = 0; i < z.coords.size(); ++i)
                    prod *= 1.0 / (1.0 - z.coords[i] * std::conj(w.coords[i]));
                return {prod, 0.0};
            }
            case KernelFamily::Custom:
                break;
        }
    }
    if (spec.variables() == 1)
        return series_1var(spec.moments(), z.coords[0] * std::conj(w.coords[0]), terms);
    return series_multi(spec.moments(), z.coords, w.coords, terms);
}

}  // namespace

KernelValue kernel_eval_bound(const KernelSpec& spec, const PointInDomain& z,
                              const PointInDomain& w, int terms) {
    return eval_impl(spec, z, w, terms, false);
}

Complex kernel_eval(const KernelSpec& spec, const PointInDomain& z, const PointInDomain& w,
                    int terms) {
    KernelValue v = eval_impl(spec, z, w, terms, false);
    if (v.tail_bound > kTailRelTol * (1.0 + std::abs(v.value)))
        throw TruncationError("kernel series tail exceeds tolerance", v.tail_bound);
    return v.value;
}

KernelValue kernel_eval_series(const KernelSpec& spec, const PointInDomain& z,
                               const PointInDomain& w, int terms) {
    return eval_impl(spec, z, w, terms, true);
}

Complex poly_eval(const PolyCoeffs& p, Complex z) {
    Complex acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double eigenvector_residual(const KernelSpec& spec, const PointInDomain& omega,
                            const PolyCoeffs& p, int truncation) {
    if (spec.variables() != 1) throw ArityError("eigenvector residual requires one variable");
    check_point(spec, omega, "omega");
    int deg = static_cast<int>(p.size()) - 1;
    while (deg > 0 && p[static_cast<size_t>(deg)] == Complex(0.0)) --deg;
    if (truncation < deg + 2)
        throw TruncationError("truncation must be at least deg(p)+2",
                              std::numeric_limits<double>::infinity());

    const int N = truncation;
    std::vector<double> mu(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) mu[static_cast<size_t>(n)] = spec.moments().at(n);

    // Exact truncation of M_p on the orthonormal monomial basis: the matrix
    // of M_{z^j} sends e_n to sqrt(mu_{n+j}/mu_n) e_{n+j}.
    Eigen::MatrixXcd Mp = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j <= deg; ++j) {
        Complex a = p[static_cast<size_t>(j)];
        if (a == Complex(0.0)) continue;
        for (int n = 0; n + j < N; ++n)
            Mp(n + j, n) += a * std::sqrt(spec.moments().at(n + j) / mu[static_cast<size_t>(n)]);
    }

    Eigen::VectorXcd k(N);
    Complex wbar = std::conj(omega.coords[0]);
    Complex pow_w = 1.0;
    for (int n = 0; n < N; ++n) {
        k(n) = pow_w / std::sqrt(mu[static_cast<size_t>(n)]);
        pow_w *= wbar;
    }

    Complex eig = std::conj(poly_eval(p, omega.coords[0]));
    Eigen::VectorXcd resid = Mp.adjoint() * k - eig * k;
    return resid.norm() / k.norm();
}

}  // namespace hilmod
