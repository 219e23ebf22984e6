#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "unfolding.hpp"

namespace catkit {

enum class GermFamily {
    morse,
    even_power,    // +-x^(2k)
    plus_family,   // +-(x^2+y^2)(x^2+a y^2)
    saddle_family, // +-(x^2-y^2)(x^2+a y^2)
    quartic_beta,  // +-(x^4+b x^2y^2+y^4)
    x_minus,       // x^4-y^4
    beyond_table,
};

inline const char* family_name(GermFamily f) {
    switch (f) {
        case GermFamily::morse: return "morse";
        case GermFamily::even_power: return "even_power";
        case GermFamily::plus_family: return "plus_family";
        case GermFamily::saddle_family: return "saddle_family";
        case GermFamily::quartic_beta: return "quartic_beta";
        case GermFamily::x_minus: return "x_minus";
        case GermFamily::beyond_table: return "beyond_table";
    }
    return "?";
}

struct ClassifyOptions {
    /// relative threshold under which float 4-jet coefficients count as zero
    double zero_tol = 1e-9;
    CodimOptions codim;
};

/// One way of presenting a corank-2 germ class (the quartic-beta and
/// product presentations overlap when |beta| > 2).
struct Presentation {
    GermFamily family = GermFamily::beyond_table;
    int sign = +1;
    std::optional<Rational> modulus_exact;
    double modulus = 0;
};

struct ClassificationResult {
    int corank = 0;
    std::vector<int> quad_signature;  // signs of the nondegenerate block, sorted
    GermFamily family = GermFamily::beyond_table;
    int sign = +1;
    int even_k = 0;  // k for the +-x^(2k) family
    std::optional<Rational> modulus_exact;
    double modulus = std::numeric_limits<double>::quiet_NaN();
    std::vector<Presentation> presentations;
    int cod_z2 = -1;  // -1 when out of table
    int sigma = -1;
    std::vector<std::string> unfolding_monomials;  // in kernel variable names
    std::string unfolding_text;
    std::string diagnostic;
    double symmetrization_residual = 0;  // filled by the mean-field pipeline
    bool residual_warning = false;
};

template <typename C>
struct SplitResult {
    Jet<C> reduced;                // germ in the kernel variables
    std::vector<int> kernel_vars;  // original indices, ascending
    std::vector<int> quad_signature;
    SignAction kernel_action;      // restriction of the action to the kernel
    Jet<C> normalized;             // full-arity jet: reduced + quadratic block
};

namespace detail {

template <typename T>
bool coeff_is_negative(const T& c) {
    return c < 0;
}

/// Restrict a sign action to a subset of coordinates.
inline SignAction restrict_action(const SignAction& action, const std::vector<int>& vars) {
    std::vector<std::vector<int>> gens;
    for (const auto& g : action.generators()) {
        std::vector<int> r;
        for (int i : vars) r.push_back(g[i]);
        gens.push_back(std::move(r));
    }
    return SignAction(static_cast<int>(vars.size()), std::move(gens));
}

inline bool action_is_full(const SignAction& a) {
    return a.elements().size() == (1u << a.vars());
}

}  // namespace detail

/// Corank, kernel variables and signature of the quadratic part. For sign
/// actions the quadratic form only couples coordinates with equal characters;
/// completing squares by equivariant linear substitutions diagonalizes it and
/// the kernel becomes a coordinate subspace.
template <typename C>
SplitResult<C> split_reduce(const Jet<C>& f, const SignAction& action, int k) {
    detail::require_invariant(f, action);
    if (!coeff_traits<C>::is_zero(f.coeff(MultiIndex::zero(f.vars()))))
        throw std::invalid_argument("germ must vanish at the origin");
    for (int i = 0; i < f.vars(); ++i)
        if (!coeff_traits<C>::is_zero(f.coeff(MultiIndex::unit(f.vars(), i))))
            throw std::invalid_argument("germ must have zero linear part");

    const int n = f.vars();
    Jet<C> g = f.with_order(k);

    auto quad_coeff = [&](int i, int j) {
        std::vector<int> e(n, 0);
        e[i] += 1;
        e[j] += 1;
        return g.coeff(MultiIndex(e));
    };
    auto linear_substitution = [&](int i, int j, const C& c) {
        // x_i <- x_i + c x_j  (equivariant when characters agree)
        std::vector<Jet<C>> map;
        for (int v = 0; v < n; ++v) map.push_back(Jet<C>::variable(n, k, v));
        map[i] = map[i] + Jet<C>::monomial(n, k, MultiIndex::unit(n, j), c);
        g = jet_compose(g, map);
    };

    // diagonalize the quadratic part by completing squares
    std::vector<int> pivots;
    auto is_pivot = [&](int i) {
        for (int p : pivots)
            if (p == i) return true;
        return false;
    };
    for (;;) {
        int piv = -1;
        for (int i = 0; i < n && piv < 0; ++i)
            if (!is_pivot(i) && !coeff_traits<C>::is_zero(quad_coeff(i, i))) piv = i;
        if (piv < 0) {
            // hyperbolic block x_i x_j with zero diagonal: make a diagonal entry
            int bi = -1, bj = -1;
            for (int i = 0; i < n && bi < 0; ++i)
                for (int j = i + 1; j < n && bi < 0; ++j)
                    if (!is_pivot(i) && !is_pivot(j) && !coeff_traits<C>::is_zero(quad_coeff(i, j))) {
                        bi = i;
                        bj = j;
                    }
            if (bi < 0) break;  // quadratic part fully diagonalized
            linear_substitution(bi, bj, coeff_traits<C>::from_int(1));
            continue;
        }
        pivots.push_back(piv);
        C d = quad_coeff(piv, piv);
        for (int j = 0; j < n; ++j) {
            if (j == piv) continue;
            C c = quad_coeff(piv, j);
            if (coeff_traits<C>::is_zero(c)) continue;
            linear_substitution(piv, j, -c / (d * coeff_traits<C>::from_int(2)));
        }
    }

    SplitResult<C> out;
    for (int i = 0; i < n; ++i)
        if (!is_pivot(i)) out.kernel_vars.push_back(i);
    for (int p : pivots) out.quad_signature.push_back(detail::coeff_is_negative(quad_coeff(p, p)) ? -1 : 1);
    std::sort(out.quad_signature.begin(), out.quad_signature.end());

    // remove all higher-order terms touching the non-kernel variables,
    // degree by degree (formal Lyapunov-Schmidt)
    for (int d = 3; d <= k; ++d) {
        std::vector<Jet<C>> correction(n, Jet<C>::zero(n, k));
        bool any = false;
        const Jet<C> slice = g.graded_slice(d, d);
        for (const auto& [m, c] : slice.terms()) {
            int touch = -1;
            for (int p : pivots)
                if (m[p] > 0) { touch = p; break; }
            if (touch < 0) continue;
            any = true;
            C dcoeff = quad_coeff(touch, touch);
            correction[touch].add_term(m.lowered(touch),
                                       -c / (dcoeff * coeff_traits<C>::from_int(2)));
        }
        if (!any) continue;
        std::vector<Jet<C>> map;
        for (int v = 0; v < n; ++v) map.push_back(Jet<C>::variable(n, k, v) + correction[v]);
        g = jet_compose(g, map);
    }

    out.normalized = g;
    out.reduced = jet_restrict(g, out.kernel_vars);
    out.kernel_action = out.kernel_vars.empty()
                            ? SignAction::trivial(1)
                            : detail::restrict_action(action, out.kernel_vars);
    return out;
}

template <typename C>
std::tuple<int, std::vector<int>, std::vector<int>> corank_and_kernel(const Jet<C>& f,
                                                                      const SignAction& action) {
    auto s = split_reduce(f, action, std::max(2, f.order()));
    return {static_cast<int>(s.kernel_vars.size()), s.kernel_vars, s.quad_signature};
}

namespace detail {

inline std::string table2_unfolding_text(const std::vector<std::string>& monos) {
    std::string s = "f";
    for (size_t i = 0; i < monos.size(); ++i) s += " + u" + std::to_string(i + 1) + "*" + monos[i];
    return s;
}

/// Corank-2 case analysis on the 4-jet A x^4 + B x^2 y^2 + C y^4 after
/// diagonal rescaling. All modulus formulas follow from matching the scaled
/// coefficients against the product normal forms.
template <typename C>
void classify_corank2(ClassificationResult& res, C A, C B, C C4, double zero_tol) {
    auto dbl = [](const C& v) {
        if constexpr (coeff_traits<C>::exact)
            return to_double(v);
        else
            return static_cast<double>(v);
    };
    // kill float noise relative to the largest coefficient
    if constexpr (!coeff_traits<C>::exact) {
        double m = std::max({std::abs(dbl(A)), std::abs(dbl(B)), std::abs(dbl(C4))});
        if (std::abs(dbl(A)) < zero_tol * m) A = 0;
        if (std::abs(dbl(B)) < zero_tol * m) B = 0;
        if (std::abs(dbl(C4)) < zero_tol * m) C4 = 0;
    }
    if (coeff_traits<C>::is_zero(A) || coeff_traits<C>::is_zero(C4)) {
        res.family = GermFamily::beyond_table;
        res.diagnostic = "vanishing pure quartic coefficient: outside the codimension <= 8 table";
        return;
    }

    const bool same_signs = !detail::coeff_is_negative(A * C4);
    auto exact_modulus = [&](const C& value) -> std::optional<Rational> {
        if constexpr (coeff_traits<C>::exact)
            return value;
        else
            return std::nullopt;
    };

    res.cod_z2 = 3;
    res.sigma = 4;
    res.unfolding_monomials = {"x^2", "y^2", "x^2*y^2"};
    res.unfolding_text = table2_unfolding_text(res.unfolding_monomials);

    if (same_signs) {
        int s = detail::coeff_is_negative(A) ? -1 : +1;
        res.sign = s;
        C beta_sq = (B * B) / (A * C4);            // scale-invariant
        C wall_gap = B * B - C(4) * A * C4;        // sign of beta^2 - 4
        bool on_wall;
        if constexpr (coeff_traits<C>::exact)
            on_wall = wall_gap == 0;
        else
            on_wall = std::abs(dbl(wall_gap)) <= zero_tol * std::max(dbl(B * B), std::abs(dbl(C(4) * A * C4)));
        if (on_wall) {
            res.family = GermFamily::beyond_table;
            res.diagnostic = "beta = +-2: perfect-square quartic, codimension >= 10";
            return;
        }
        int beta_sign = coeff_traits<C>::is_zero(B) ? 0 : (detail::coeff_is_negative(B) ? -s : s);
        double beta = beta_sign * std::sqrt(dbl(beta_sq));

        Presentation quartic;
        quartic.family = GermFamily::quartic_beta;
        quartic.sign = s;
        quartic.modulus = beta;
        if constexpr (coeff_traits<C>::exact) {
            if (auto root = exact_sqrt(beta_sq)) quartic.modulus_exact = Rational(beta_sign) * *root;
        }

        if (detail::coeff_is_negative(wall_gap)) {  // |beta| < 2: quartic presentation only
            res.presentations = {quartic};
        } else {
            // disc = beta^2 (beta^2 - 4) is rational whenever the jet is
            Presentation product;
            product.sign = s;
            C disc = beta_sq * (beta_sq - C(4));
            double sq = std::sqrt(dbl(disc));
            std::optional<Rational> sq_exact;
            if constexpr (coeff_traits<C>::exact) sq_exact = exact_sqrt(disc);
            if (beta > 0) {
                product.family = GermFamily::plus_family;  // alpha > 1 canonical
                product.modulus = (dbl(beta_sq) - 2 + sq) / 2;
                if (sq_exact) product.modulus_exact = (Rational(beta_sq) - 2 + *sq_exact) / 2;
            } else {
                product.family = GermFamily::saddle_family;  // alpha in (-1, 0)
                product.modulus = -(dbl(beta_sq) - 2 - sq) / 2;
                if (sq_exact) product.modulus_exact = -(Rational(beta_sq) - 2 - *sq_exact) / 2;
            }
            // primary presentation: prefer the one with an exact modulus
            if (product.modulus_exact || !quartic.modulus_exact)
                res.presentations = {product, quartic};
            else
                res.presentations = {quartic, product};
        }
    } else {
        // mixed outer signs: canonicalize A > 0 by the coordinate swap
        if (detail::coeff_is_negative(A)) std::swap(A, C4);
        res.sign = +1;
        C D = -(A * C4);
        if (coeff_traits<C>::is_zero(B)) {
            Presentation p;
            p.family = GermFamily::x_minus;
            p.sign = +1;
            res.presentations = {p};
        } else {
            Presentation p;
            p.family = GermFamily::saddle_family;  // (x^2-y^2)(x^2+alpha y^2), alpha > 0
            p.sign = +1;
            C disc = B * B + C(4) * D;
            double sq = std::sqrt(dbl(disc));
            p.modulus = (dbl(B) + sq) * (dbl(B) + sq) / (4 * dbl(D));
            if constexpr (coeff_traits<C>::exact) {
                if (auto root = exact_sqrt(disc)) p.modulus_exact = (B + *root) * (B + *root) / (C(4) * D);
            }
            res.presentations = {p};
        }
    }

    res.family = res.presentations.front().family;
    res.sign = res.presentations.front().sign;
    res.modulus = res.presentations.front().modulus;
    res.modulus_exact = res.presentations.front().modulus_exact;
}

}  // namespace detail

/// Classification of a Z2-invariant germ per the corank <= 2 tables: corank,
/// splitting reduction, normal-form matching and modulus extraction. The
/// action must restrict to independent per-coordinate flips on the kernel.
template <typename C>
ClassificationResult classify_germ(const Jet<C>& f, const SignAction& action,
                                   const ClassifyOptions& opts = {}) {
    auto split = split_reduce(f, action, f.order());
    ClassificationResult res;
    res.corank = static_cast<int>(split.kernel_vars.size());
    res.quad_signature = split.quad_signature;

    if (res.corank == 0) {
        res.family = GermFamily::morse;
        res.cod_z2 = 0;
        res.sigma = 2;
        res.unfolding_text = "f";
        return res;
    }
    if (!detail::action_is_full(split.kernel_action))
        throw std::invalid_argument("classification requires per-coordinate parity on the kernel variables");
    if (res.corank >= 3) {
        res.family = GermFamily::beyond_table;
        res.diagnostic = "corank >= 3: codimension >= 9";
        return res;
    }

    const Jet<C>& fr = split.reduced;

    if (res.corank == 1) {
        // lowest non-negligible even term a x^(2k)
        double maxc = 0;
        if constexpr (!coeff_traits<C>::exact)
            for (const auto& [m, c] : fr.terms()) maxc = std::max(maxc, std::abs(static_cast<double>(c)));
        for (const auto& [m, c] : fr.terms()) {
            if constexpr (!coeff_traits<C>::exact)
                if (std::abs(static_cast<double>(c)) < opts.zero_tol * maxc) continue;
            int deg = m.degree();
            res.even_k = deg / 2;
            res.sign = detail::coeff_is_negative(c) ? -1 : +1;
            break;
        }
        if (res.even_k == 0) {
            res.family = GermFamily::beyond_table;
            res.diagnostic = "reduced germ vanishes at this truncation order";
            return res;
        }
        res.family = GermFamily::even_power;
        res.cod_z2 = res.even_k - 1;
        res.sigma = 2 * res.even_k;
        for (int j = 1; j < res.even_k; ++j)
            res.unfolding_monomials.push_back("x^" + std::to_string(2 * j));
        res.unfolding_text = detail::table2_unfolding_text(res.unfolding_monomials);
        return res;
    }

    // corank 2: read the 4-jet in the kernel variables
    if (fr.order() < 4) throw std::invalid_argument("order too low to read the 4-jet");
    C A = fr.coeff(MultiIndex({4, 0}));
    C B = fr.coeff(MultiIndex({2, 2}));
    C C4 = fr.coeff(MultiIndex({0, 4}));
    if (coeff_traits<C>::is_zero(A) && coeff_traits<C>::is_zero(B) && coeff_traits<C>::is_zero(C4)) {
        res.family = GermFamily::beyond_table;
        res.diagnostic = "identically zero 4-jet on the kernel";
        return res;
    }
    detail::classify_corank2(res, A, B, C4, opts.zero_tol);
    return res;
}

}  // namespace catkit
