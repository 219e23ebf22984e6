#pragma once

#include <optional>
#include <string>
#include <vector>

#include "local_algebra.hpp"

namespace catkit {

/// Parametric family F(x,u) with F(x,0) = base, stored as the base germ plus
/// the initial-speed germs alpha_i = dF/du_i at u = 0. Parameters carry no
/// group action.
template <typename C>
struct Unfolding {
    Jet<C> base;
    std::vector<std::string> param_names;
    std::vector<Jet<C>> alphas;
    std::optional<Jet<C>> full;  // jet in n + r variables when available

    int params() const { return static_cast<int>(alphas.size()); }
};

/// Extract base and initial speeds from a jet in n + r variables whose last r
/// variables are the parameters. Each slice must be invariant in x.
template <typename C>
Unfolding<C> alphas_of(const Jet<C>& full, int n, const SignAction& action,
                       std::vector<std::string> param_names = {}) {
    int total = full.vars();
    int r = total - n;
    if (r < 0 || n != action.vars()) throw std::invalid_argument("unfolding arity mismatch");
    std::vector<int> xvars(n);
    for (int i = 0; i < n; ++i) xvars[i] = i;

    Unfolding<C> u;
    u.full = full;
    u.base = jet_restrict(full, xvars);
    detail::require_invariant(u.base, action);
    for (int j = 0; j < r; ++j) {
        Jet<C> a = jet_restrict(jet_partial(full, n + j), xvars);
        detail::require_invariant(a, action);
        u.alphas.push_back(std::move(a));
    }
    if (param_names.empty())
        for (int j = 0; j < r; ++j) param_names.push_back("u" + std::to_string(j + 1));
    u.param_names = std::move(param_names);
    return u;
}

struct TransversalityReport {
    bool transversal = false;
    int order_used = 0;
    std::vector<MultiIndex> missing;  // invariant monomials not spanned
    bool minimal = false;             // r equals the Gamma-codimension
    int codim = 0;
    int base_params = 0;
};

/// Algebraic transversality test: the extended tangent span, the constants
/// and the alpha jets must together span the invariant jet space at the
/// certified determinacy order.
template <typename C>
TransversalityReport is_transversal(const Unfolding<C>& u, const SignAction& action,
                                    const CodimOptions& opts = {}) {
    auto rep = codimension(u.base, action, opts);
    if (!rep.certified || !rep.value.has_value())
        throw std::runtime_error("base germ not finitely determined at cap; transversality undecidable");
    int k = std::max(*rep.sigma, 2);

    // columns: constant monomial plus all invariant monomials of degree <= k
    std::vector<MultiIndex> monomials{MultiIndex::zero(action.vars())};
    for (auto& m : action.invariant_monomials(1, k)) monomials.push_back(m);
    detail::ColumnBasis cols(monomials);
    RowSpan<C> span(static_cast<int>(cols.monomials.size()), cols.pivot_order, opts.float_tol);

    span.add_row(cols.row_of(Jet<C>::constant(action.vars(), k, coeff_traits<C>::from_int(1))));
    for (const auto& row : tangent_span(u.base, action, k, /*extended=*/true).basis_jets)
        span.add_row(cols.row_of(row));
    for (const auto& a : u.alphas) {
        detail::require_invariant(a, action);
        span.add_row(cols.row_of(a.with_order(k)));
    }

    TransversalityReport out;
    out.order_used = k;
    out.codim = *rep.value;
    out.base_params = u.params();
    for (int i = 0; i < static_cast<int>(cols.monomials.size()); ++i)
        if (!span.is_pivot(i)) out.missing.push_back(cols.monomials[i]);
    out.transversal = out.missing.empty();
    out.minimal = out.transversal && u.params() == *rep.value;
    return out;
}

/// F = f + sum u_i z_i over the codimension complement monomials; transversal
/// with the minimum parameter count by construction. Codimension 0 yields the
/// trivial unfolding.
template <typename C>
Unfolding<C> universal_unfolding(const Jet<C>& f, const SignAction& action,
                                 const CodimOptions& opts = {}) {
    auto rep = codimension(f, action, opts);
    if (!rep.value.has_value())
        throw std::runtime_error("infinite-suspected codimension: no universal unfolding");
    int q = *rep.value;
    int n = f.vars();

    Unfolding<C> u;
    u.base = f;
    int full_order = f.order();
    for (const auto& z : rep.complement) full_order = std::max(full_order, z.degree() + 1);
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = i;
    Jet<C> full = jet_embed(f, n + q, pos).with_order(full_order);
    for (int j = 0; j < q; ++j) {
        const MultiIndex& z = rep.complement[j];
        u.alphas.push_back(Jet<C>::monomial(n, f.order(), z, coeff_traits<C>::from_int(1)));
        u.param_names.push_back("u" + std::to_string(j + 1));
        // u_j * z_j term in the full jet
        std::vector<int> e(n + q, 0);
        for (int i = 0; i < n; ++i) e[i] = z[i];
        e[n + j] = 1;
        full.add_term(MultiIndex(e), coeff_traits<C>::from_int(1));
    }
    u.full = std::move(full);
    return u;
}

}  // namespace catkit
