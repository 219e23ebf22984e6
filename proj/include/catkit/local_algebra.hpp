#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "row_span.hpp"
#include "sign_action.hpp"

namespace catkit {

struct CodimOptions {
    int cap = 16;            // truncation-order cap for escalation
    double float_tol = 1e-8; // relative rank tolerance on the float path
};

/// Jet-level spanning set of the (extended) orbit tangent space: products
/// phi . grad f over equivariant monomial vector fields of degree <= k.
/// Non-extended fields vanish at the origin; extended adds the constant
/// fields along group-fixed coordinates.
template <typename C>
struct TangentSpan {
    int n = 0;
    int order = 0;
    bool extended = false;
    std::vector<Jet<C>> basis_jets;
};

namespace detail {

template <typename C>
void require_invariant(const Jet<C>& f, const SignAction& action) {
    if (f.vars() != action.vars()) throw std::invalid_argument("jet/action arity mismatch");
    Jet<C> residual = f - action.reynolds(f);
    if constexpr (coeff_traits<C>::exact) {
        if (!residual.is_zero()) throw std::invalid_argument("germ is not invariant under the action");
    } else {
        double worst = 0, scale = 0;
        for (const auto& [m, c] : f.terms()) scale = std::max(scale, std::abs(static_cast<double>(c)));
        for (const auto& [m, c] : residual.terms()) worst = std::max(worst, std::abs(static_cast<double>(c)));
        if (scale > 0 && worst > 1e-7 * scale)
            throw std::invalid_argument("germ is not invariant under the action");
    }
}

/// Column index assignment for a monomial basis, plus the processing order
/// used for pivot selection (staircase order: lowest degree first, pure
/// powers before mixed monomials within a degree).
struct ColumnBasis {
    std::vector<MultiIndex> monomials;  // graded-lex, the report order
    std::map<MultiIndex, int, GrlexLess> index;
    std::vector<int> pivot_order;

    explicit ColumnBasis(std::vector<MultiIndex> ms) : monomials(std::move(ms)) {
        for (int i = 0; i < static_cast<int>(monomials.size()); ++i) index.emplace(monomials[i], i);
        pivot_order.resize(monomials.size());
        for (size_t i = 0; i < monomials.size(); ++i) pivot_order[i] = static_cast<int>(i);
        std::stable_sort(pivot_order.begin(), pivot_order.end(), [&](int a, int b) {
            return staircase_less(monomials[a], monomials[b]);
        });
    }

    template <typename C>
    std::vector<C> row_of(const Jet<C>& f) const {
        std::vector<C> v(monomials.size(), coeff_traits<C>::from_int(0));
        for (const auto& [m, c] : f.terms()) {
            auto it = index.find(m);
            if (it != index.end()) v[it->second] = c;
            // terms outside the basis (non-invariant or out of range) cannot
            // occur for invariant jets within the degree window
        }
        return v;
    }
};

}  // namespace detail

template <typename C>
TangentSpan<C> tangent_span(const Jet<C>& f, const SignAction& action, int k, bool extended) {
    detail::require_invariant(f, action);
    Jet<C> fk = f.with_order(k);
    std::vector<Jet<C>> grads;
    for (int i = 0; i < action.vars(); ++i) grads.push_back(jet_partial(fk, i));
    TangentSpan<C> span;
    span.n = action.vars();
    span.order = k;
    span.extended = extended;
    for (const auto& [i, m] : action.equivariant_fields(extended ? 0 : 1, k)) {
        Jet<C> row = jet_mul(Jet<C>::monomial(span.n, k, m, coeff_traits<C>::from_int(1)), grads[i]);
        if (!row.is_zero()) span.basis_jets.push_back(std::move(row));
    }
    return span;
}

namespace detail {

/// Rows spanning jets of M(Gamma) . T_O: products m' . df/dx_i where m' e_i is
/// an equivariant monomial field that factors as (invariant, degree >= 1) x
/// (equivariant field vanishing at 0).
template <typename C>
std::vector<Jet<C>> ideal_tangent_rows(const Jet<C>& f, const SignAction& action, int order) {
    Jet<C> fk = f.with_order(order);
    std::vector<Jet<C>> grads;
    for (int i = 0; i < action.vars(); ++i) grads.push_back(jet_partial(fk, i));

    std::vector<MultiIndex> invariant_divisors = action.invariant_monomials(1, order - 1);
    std::vector<Jet<C>> rows;
    for (const auto& [i, m] : action.equivariant_fields(1, order)) {
        bool factors = false;
        for (const auto& d : invariant_divisors) {
            if (d.degree() >= m.degree()) break;  // sorted by degree
            if (d.divides(m)) { factors = true; break; }
        }
        if (!factors) continue;
        Jet<C> row = jet_mul(Jet<C>::monomial(action.vars(), order, m, coeff_traits<C>::from_int(1)), grads[i]);
        if (!row.is_zero()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Sufficient jet-level certificate that f is Gamma-k-determined: every
/// invariant monomial of degree in [k+1, N] lies in the jet-N row space of
/// M(Gamma).T_O, with verification margin N = max(2k, k+4). This is the
/// equivariant analogue of the classical M^{k+1} in M^2.J(f) criterion;
/// sound but not necessary.
template <typename C>
bool determinacy_certificate(const Jet<C>& f, const SignAction& action, int k,
                             const CodimOptions& opts = {}) {
    int N = std::max(2 * k, k + 4);
    detail::require_invariant(f, action);
    detail::ColumnBasis cols(action.invariant_monomials(1, N));
    RowSpan<C> span(static_cast<int>(cols.monomials.size()), cols.pivot_order, opts.float_tol);
    for (const auto& row : detail::ideal_tangent_rows(f, action, N)) span.add_row(cols.row_of(row));
    for (const auto& m : action.invariant_monomials(k + 1, N)) {
        std::vector<C> v(cols.monomials.size(), coeff_traits<C>::from_int(0));
        v[cols.index.at(m)] = coeff_traits<C>::from_int(1);
        if (!span.contains(std::move(v))) return false;
    }
    return true;
}

/// Smallest certified determinacy order, or nullopt when the certificate's
/// truncation requirement exceeds the cap ("undetermined-at-cap").
template <typename C>
std::optional<int> determinacy_order(const Jet<C>& f, const SignAction& action,
                                     const CodimOptions& opts = {}) {
    for (int k = 1; std::max(2 * k, k + 4) <= std::max(opts.cap, 8); ++k)
        if (determinacy_certificate(f, action, k, opts)) return k;
    return std::nullopt;
}

template <typename C>
struct CodimReport {
    std::optional<int> value;  // empty means infinite-suspected
    int order_used = 0;
    bool certified = false;
    std::optional<int> sigma;
    std::vector<MultiIndex> complement;  // graded-lex; spans M(Gamma)/T_ext at jet level

    bool infinite_suspected() const { return !value.has_value(); }
};

/// Gamma-codimension of an invariant germ with vanishing constant term:
/// counts invariant monomials outside the jet-level extended tangent span,
/// escalating the truncation order until the count stabilizes and the
/// determinacy certificate holds.
template <typename C>
CodimReport<C> codimension(const Jet<C>& f, const SignAction& action, const CodimOptions& opts = {}) {
    detail::require_invariant(f, action);
    if (!coeff_traits<C>::is_zero(f.coeff(MultiIndex::zero(f.vars()))))
        throw std::invalid_argument("germ must have zero constant term");

    CodimReport<C> report;
    report.sigma = determinacy_order(f, action, opts);
    report.certified = report.sigma.has_value();

    auto complement_at = [&](int N) {
        detail::ColumnBasis cols(action.invariant_monomials(1, N));
        RowSpan<C> span(static_cast<int>(cols.monomials.size()), cols.pivot_order, opts.float_tol);
        for (const auto& row : tangent_span(f, action, N, /*extended=*/true).basis_jets) {
            // rows with a constant part cannot appear for germs singular at 0;
            // the degree-0 component is simply absent from the column basis
            span.add_row(cols.row_of(row.graded_slice(1, N)));
        }
        std::vector<MultiIndex> complement;
        for (int i = 0; i < static_cast<int>(cols.monomials.size()); ++i)
            if (!span.is_pivot(i)) complement.push_back(cols.monomials[i]);
        return complement;
    };

    if (!report.certified) {
        report.order_used = opts.cap;
        report.complement = complement_at(opts.cap);
        return report;  // infinite-suspected: value left empty
    }

    int N = std::max(*report.sigma, 2);
    int limit = std::max(opts.cap, *report.sigma + 4);
    std::vector<MultiIndex> prev = complement_at(N);
    while (N + 1 <= limit) {
        std::vector<MultiIndex> next = complement_at(N + 1);
        if (next.size() == prev.size()) {
            report.order_used = N + 1;
            report.value = static_cast<int>(next.size());
            report.complement = std::move(next);
            return report;
        }
        prev = std::move(next);
        ++N;
    }
    report.order_used = N;
    report.certified = false;
    report.complement = std::move(prev);
    return report;
}

}  // namespace catkit
