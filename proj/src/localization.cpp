#include "hilmod/localization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hilmod {

namespace {

constexpr double kRankRelCutoff = 1e-9;
constexpr double kRankGapRatio = 1e3;

int total_degree(const MultiIndex& idx) {
    int d = 0;
    for (int j : idx) d += j;
    return d;
}

// Graded lexicographic enumeration of multi-indices with |alpha| <= cap.
std::vector<MultiIndex> enumerate_monomials(int vars, int cap) {
    std::vector<MultiIndex> out;
    MultiIndex scratch(static_cast<size_t>(vars), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos + 1 == vars) {
            scratch[static_cast<size_t>(pos)] = remaining;
            out.push_back(scratch);
            return;
        }
        for (int j = remaining; j >= 0; --j) {
            scratch[static_cast<size_t>(pos)] = j;
            rec(pos + 1, remaining - j);
        }
    };
    for (int d = 0; d <= cap; ++d) rec(0, d);
    return out;
}

bool is_zero_point(const std::vector<Complex>& omega) {
    for (Complex c : omega)
        if (c != Complex(0.0)) return false;
    return true;
}

long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

long long llgcd(long long a, long long b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a == 0 ? 1 : a;
}

Rational reduce(long long num, long long den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = llgcd(num, den);
    return {num / g, den / g};
}

}  // namespace

TruncatedModule::TruncatedModule(KernelSpec spec, int degree_cap, int multiplicity,
                                 bool vanish_at_origin)
    : spec_(std::move(spec)),
      degree_cap_(degree_cap),
      multiplicity_(multiplicity),
      generator_degree_(vanish_at_origin ? 1 : 0) {
    if (degree_cap < 1) throw Error("degree cap must be at least 1");
    if (multiplicity < 1) throw Error("multiplicity must be at least 1");
    monomials_ = enumerate_monomials(spec_.variables(), degree_cap);
    if (vanish_at_origin)
        monomials_.erase(monomials_.begin());  // graded order puts the constant first
    for (int i = 0; i < static_cast<int>(monomials_.size()); ++i)
        position_[monomials_[static_cast<size_t>(i)]] = i;
    for (const MultiIndex& idx : monomials_) {
        double mu = spec_.moments().at(idx);
        if (!(mu > 0.0)) throw Error("gram diagonal must be positive");
    }
}

TruncatedModule TruncatedModule::full(const KernelSpec& spec, int degree_cap, int multiplicity) {
    return TruncatedModule(spec, degree_cap, multiplicity, false);
}

TruncatedModule TruncatedModule::vanishing_at_origin(const KernelSpec& spec, int degree_cap,
                                                     int multiplicity) {
    return TruncatedModule(spec, degree_cap, multiplicity, true);
}

double TruncatedModule::gram_diag(int monomial_index) const {
    return spec_.moments().at(monomials_.at(static_cast<size_t>(monomial_index)));
}

Eigen::MatrixXd TruncatedModule::mult_matrix(int var) const {
    if (var < 0 || var >= variables()) throw ArityError("variable index out of range");
    int n = static_cast<int>(monomials_.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        MultiIndex target = monomials_[static_cast<size_t>(c)];
        target[static_cast<size_t>(var)] += 1;
        int rpos = monomial_position(target);
        if (rpos < 0) continue;  // image exceeds the cap
        double mu_from = spec_.moments().at(monomials_[static_cast<size_t>(c)]);
        double mu_to = spec_.moments().at(target);
        m(rpos, c) = std::sqrt(mu_to / mu_from);
    }
    return m;
}

int TruncatedModule::monomial_position(const MultiIndex& idx) const {
    auto it = position_.find(idx);
    return it == position_.end() ? -1 : it->second;
}

QuotientDim quotient_dim(const TruncatedModule& mod, const std::vector<Complex>& omega, int power) {
    if (static_cast<int>(omega.size()) != mod.variables())
        throw ArityError("localization point arity mismatch");
    if (power < 1) throw Error("ideal power must be at least 1");
    const int vars = mod.variables();
    const int cap = mod.degree_cap();
    if (cap < power + mod.generator_degree())
        throw TruncationError("degree cap too small for this ideal power",
                              std::numeric_limits<double>::infinity());

    const auto& basis = mod.monomials();
    const int nb = static_cast<int>(basis.size());
    const int mult = mod.multiplicity();
    const int rows = nb * mult;
    const bool at_origin = is_zero_point(omega);

    std::vector<MultiIndex> betas = enumerate_monomials(vars, power);
    betas.erase(std::remove_if(betas.begin(), betas.end(),
                               [&](const MultiIndex& b) { return total_degree(b) != power; }),
                betas.end());

    // Columns: (z - omega)^beta * b for every basis monomial b of degree
    // <= cap - power, per copy. Rows are orthonormal-basis coordinates.
    std::vector<Eigen::VectorXcd> cols;
    for (int bi = 0; bi < nb; ++bi) {
        const MultiIndex& b = basis[static_cast<size_t>(bi)];
        if (total_degree(b) > cap - power) continue;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nb);
        for (const MultiIndex& beta : betas) {
            // expand prod_i (z_i - omega_i)^{beta_i} over gamma <= beta
            std::function<void(int, MultiIndex&, Complex)> expand = [&](int pos, MultiIndex& gamma,
                                                                        Complex coeff) {
                if (pos == vars) {
                    MultiIndex target = b;
                    for (int i = 0; i < vars; ++i)
                        target[static_cast<size_t>(i)] += gamma[static_cast<size_t>(i)];
                    int p = mod.monomial_position(target);
                    if (p >= 0)
                        v(p) += coeff * std::sqrt(mod.spec().moments().at(target));
                    return;
                }
                int bmax = beta[static_cast<size_t>(pos)];
                double binom = 1.0;
                Complex w = -omega[static_cast<size_t>(pos)];
                Complex wpow = 1.0;
                for (int g = bmax; g >= 0; --g) {
                    // coefficient C(bmax, g) * (-omega)^{bmax-g}
                    gamma[static_cast<size_t>(pos)] = g;
                    double c_binom = binom;
                    expand(pos + 1, gamma, coeff * c_binom * wpow);
                    binom = binom * g / (bmax - g + 1);
                    wpow *= w;
                }
                gamma[static_cast<size_t>(pos)] = 0;
            };
            MultiIndex gamma(static_cast<size_t>(vars), 0);
            expand(0, gamma, Complex(1.0));
            // each beta contributes its own column
            cols.push_back(v);
            v = Eigen::VectorXcd::Zero(nb);
        }
    }

    if (cols.empty()) return {rows, at_origin};

    Eigen::MatrixXcd m(rows, static_cast<int>(cols.size()) * mult);
    m.setZero();
    for (int c = 0; c < static_cast<int>(cols.size()); ++c)
        for (int copy = 0; copy < mult; ++copy)
            m.block(copy * nb, c * mult + copy, nb, 1) = cols[static_cast<size_t>(c)];

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    Eigen::VectorXd sv = svd.singularValues();
    double top = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankRelCutoff * top) ++rank;
    if (rank > 0 && rank < sv.size()) {
        double kept = sv(rank - 1);
        double dropped = sv(rank);
        if (dropped > 0.0 && kept / dropped < kRankGapRatio)
            throw PrecisionError("singular-value gap is ambiguous for the rank decision");
    }
    return {rows - rank, at_origin};
}

namespace {

// Exact binomial C(x, j) for integer x (possibly negative) and j >= 0.
long long binom_int(long long x, int j) {
    __int128 prod = 1;
    for (int i = 0; i < j; ++i) prod *= (x - i);
    for (int i = 2; i <= j; ++i) prod /= i;
    return static_cast<long long>(prod);
}

// Polynomial arithmetic over rationals (tiny degrees).
using RatPoly = std::vector<Rational>;

RatPoly rp_scale(const RatPoly& p, Rational s) {
    RatPoly out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = reduce(p[i].num * s.num, p[i].den * s.den);
    return out;
}

RatPoly rp_add(const RatPoly& a, const RatPoly& b) {
    RatPoly out(std::max(a.size(), b.size()), Rational{0, 1});
    for (size_t i = 0; i < out.size(); ++i) {
        Rational x = i < a.size() ? a[i] : Rational{0, 1};
        Rational y = i < b.size() ? b[i] : Rational{0, 1};
        out[i] = reduce(x.num * y.den + y.num * x.den, x.den * y.den);
    }
    return out;
}

RatPoly rp_mul(const RatPoly& a, const RatPoly& b) {
    RatPoly out(a.size() + b.size() - 1, Rational{0, 1});
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            Rational t = reduce(a[i].num * b[j].num, a[i].den * b[j].den);
            out[i + j] = reduce(out[i + j].num * t.den + t.num * out[i + j].den,
                                out[i + j].den * t.den);
        }
    return out;
}

std::string poly_to_text(const std::vector<Rational>& coeffs) {
    // common denominator presentation: (c_d k^d + ... ) / q
    long long q = 1;
    for (const Rational& c : coeffs) q = q / llgcd(q, c.den) * c.den;
    std::vector<long long> num(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) num[i] = coeffs[i].num * (q / coeffs[i].den);

    std::string body;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
        long long c = num[static_cast<size_t>(i)];
        if (c == 0) continue;
        std::string term;
        long long a = std::abs(c);
        if (i == 0) {
            term = std::to_string(a);
        } else {
            if (a != 1) term = std::to_string(a) + "*";
            term += i == 1 ? "k" : "k^" + std::to_string(i);
        }
        if (body.empty())
            body = (c < 0 ? "-" : "") + term;
        else
            body += (c < 0 ? " - " : " + ") + term;
    }
    if (body.empty()) body = "0";
    if (q == 1) return body;
    return "(" + body + ")/" + std::to_string(q);
}

}  // namespace

HilbertSamuelFit hilbert_samuel(const TruncatedModule& mod, const std::vector<Complex>& omega,
                                int k_max) {
    if (k_max < 3) throw Error("k_max must be at least 3");
    if (mod.degree_cap() < k_max + 1)
        throw TruncationError("degree cap must be at least k_max + 1",
                              std::numeric_limits<double>::infinity());

    HilbertSamuelFit fit;
    fit.dims.reserve(static_cast<size_t>(k_max));
    for (int k = 1; k <= k_max; ++k)
        fit.dims.push_back(quotient_dim(mod, omega, k).value);

    const auto& d = fit.dims;
    for (int deg = 0; deg <= k_max - 2; ++deg) {
        // Newton forward differences at base k0 = k_max - deg.
        int k0 = k_max - deg;
        std::vector<long long> diff;
        for (int j = 0; j <= deg; ++j) diff.push_back(d[static_cast<size_t>(k0 + j - 1)]);
        for (int level = 1; level <= deg; ++level)
            for (int j = deg; j >= level; --j) diff[static_cast<size_t>(j)] -= diff[static_cast<size_t>(j - 1)];

        auto eval = [&](long long k) {
            long long acc = 0;
            for (int j = 0; j <= deg; ++j) acc += diff[static_cast<size_t>(j)] * binom_int(k - k0, j);
            return acc;
        };

        int stable_from = k_max + 1;
        for (int k = k_max; k >= 1; --k) {
            if (eval(k) != d[static_cast<size_t>(k - 1)]) break;
            stable_from = k;
        }
        if (k_max - stable_from + 1 < deg + 2) continue;  // need a certifying extra point

        // expand sum_j diff_j * C(k - k0, j) into monomial coefficients
        RatPoly poly{Rational{0, 1}};
        for (int j = 0; j <= deg; ++j) {
            RatPoly term{Rational{1, 1}};
            for (int i = 0; i < j; ++i) {
                RatPoly lin{Rational{-(k0 + i), 1}, Rational{1, 1}};  // (k - k0 - i)
                term = rp_mul(term, lin);
            }
            long long jfact = 1;
            for (int i = 2; i <= j; ++i) jfact *= i;
            term = rp_scale(term, reduce(diff[static_cast<size_t>(j)], jfact));
            poly = rp_add(poly, term);
        }
        while (poly.size() > 1 && poly.back().num == 0) poly.pop_back();

        fit.poly = poly;
        fit.degree = static_cast<int>(poly.size()) - 1;
        fit.stable_from = stable_from;
        fit.poly_text = poly_to_text(poly);
        return fit;
    }
    throw FitError("quotient dimensions did not stabilize by k_max; raise k_max");
}

long long hs_poly_eval(const HilbertSamuelFit& fit, long long k) {
    long long q = 1;
    for (const Rational& c : fit.poly) q = q / llgcd(q, c.den) * c.den;
    __int128 acc = 0;
    for (size_t i = 0; i < fit.poly.size(); ++i)
        acc += static_cast<__int128>(fit.poly[i].num) * (q / fit.poly[i].den) * ipow(k, static_cast<int>(i));
    if (acc % q != 0) throw Error("fitted polynomial is not integer-valued at this k");
    return static_cast<long long>(acc / q);
}

TruncatedModule vanishing_submodule(const KernelSpec& spec, int n, int degree_cap,
                                    const std::vector<Complex>& q) {
    if (spec.variables() != n) throw ArityError("variable count mismatch");
    if (static_cast<int>(q.size()) != n) throw ArityError("point arity mismatch");
    if (!is_zero_point(q))
        throw PredicateError("only the vanishing-at-origin predicate is supported");
    return TruncatedModule::vanishing_at_origin(spec, degree_cap);
}

}  // namespace hilmod
