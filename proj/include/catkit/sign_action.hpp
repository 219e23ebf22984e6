#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "jet.hpp"

namespace catkit {

/// Finite diagonal sign-group action on R^n: a subgroup of {-1,+1}^n acting
/// coordinatewise. The paper's symmetry groups for classification are of this
/// form (per-coordinate parity); the trivial group recovers the classical,
/// non-equivariant theory.
class SignAction {
public:
    SignAction() : n_(0) {}
    SignAction(int n, std::vector<std::vector<int>> generators) : n_(n), gens_(std::move(generators)) {
        if (n < 1) throw std::invalid_argument("need n >= 1");
        if (n > 24) throw std::invalid_argument("variable count cap (24) exceeded");
        for (auto& g : gens_) {
            if (static_cast<int>(g.size()) != n_) throw std::invalid_argument("generator arity mismatch");
            for (int v : g)
                if (v != 1 && v != -1) throw std::invalid_argument("generator entries must be +-1");
        }
        generate();
    }

    static SignAction trivial(int n) { return SignAction(n, {}); }
    static SignAction full(int n) {
        std::vector<std::vector<int>> gens;
        for (int i = 0; i < n; ++i) {
            std::vector<int> g(n, 1);
            g[i] = -1;
            gens.push_back(std::move(g));
        }
        return SignAction(n, std::move(gens));
    }
    static SignAction overall(int n) {
        return SignAction(n, {std::vector<int>(n, -1)});
    }

    int vars() const { return n_; }
    const std::vector<std::vector<int>>& generators() const { return gens_; }

    /// Every group element as a sign vector, sorted with the identity first.
    const std::vector<std::vector<int>>& elements() const { return elements_; }

    /// Coordinates fixed by the whole group.
    std::vector<int> fixed_coords() const {
        std::vector<int> out;
        for (int i = 0; i < n_; ++i) {
            bool fixed = true;
            for (const auto& g : gens_)
                if (g[i] == -1) { fixed = false; break; }
            if (fixed) out.push_back(i);
        }
        return out;
    }

    bool is_trivial() const { return elements_.size() == 1; }

    /// Character of a monomial on one group element.
    static int character(const MultiIndex& m, const std::vector<int>& gamma) {
        int chi = 1;
        for (int i = 0; i < m.size(); ++i)
            if (gamma[i] == -1 && (m[i] & 1)) chi = -chi;
        return chi;
    }

    /// m(gamma x) = m(x) for the whole group (generators suffice: characters
    /// are multiplicative).
    bool invariant(const MultiIndex& m) const {
        for (const auto& g : gens_)
            if (character(m, g) != 1) return false;
        return true;
    }

    /// m * e_i transforms like coordinate i: m(gamma x) gamma_i = m(x).
    bool equivariant_for(const MultiIndex& m, int i) const {
        for (const auto& g : gens_)
            if (character(m, g) * g[i] != 1) return false;
        return true;
    }

    std::vector<MultiIndex> invariant_monomials(int deg_lo, int deg_hi) const {
        std::vector<MultiIndex> out;
        for (const auto& m : monomials_up_to(n_, deg_lo, deg_hi))
            if (invariant(m)) out.push_back(m);
        return out;
    }

    /// Monomial vector fields m*e_i with the right transformation character,
    /// component-major then graded-lex. Degree 0 (constant fields) only
    /// appears along group-fixed coordinates.
    std::vector<std::pair<int, MultiIndex>> equivariant_fields(int deg_lo, int deg_hi) const {
        std::vector<std::pair<int, MultiIndex>> out;
        for (int i = 0; i < n_; ++i)
            for (const auto& m : monomials_up_to(n_, deg_lo, deg_hi))
                if (equivariant_for(m, i)) out.emplace_back(i, m);
        return out;
    }

    template <typename C>
    bool is_invariant(const Jet<C>& f) const {
        for (const auto& [m, c] : f.terms())
            if (!invariant(m)) return false;
        return true;
    }

    /// Group average (1/|G|) sum_gamma f(gamma x). For a sign action this is
    /// exactly the projection that drops the non-invariant monomials, by
    /// character orthogonality, so it is exact on both coefficient paths.
    template <typename C>
    Jet<C> reynolds(const Jet<C>& f) const {
        Jet<C> r(f.vars(), f.order());
        for (const auto& [m, c] : f.terms())
            if (invariant(m)) r.add_term(m, c);
        return r;
    }

    /// Largest non-invariant coefficient magnitude, relative to the largest
    /// coefficient; 0 for invariant jets. Float-path diagnostic.
    static double symmetry_residual(const Jet<double>& f, const SignAction& action) {
        double maxc = 0, maxbad = 0;
        for (const auto& [m, c] : f.terms()) {
            maxc = std::max(maxc, std::abs(c));
            if (!action.invariant(m)) maxbad = std::max(maxbad, std::abs(c));
        }
        return maxc == 0 ? 0.0 : maxbad / maxc;
    }

private:
    void generate() {
        std::set<std::vector<int>> seen;
        std::vector<std::vector<int>> frontier{std::vector<int>(n_, 1)};
        seen.insert(frontier[0]);
        while (!frontier.empty()) {
            std::vector<std::vector<int>> next;
            for (const auto& e : frontier)
                for (const auto& g : gens_) {
                    std::vector<int> p(n_);
                    for (int i = 0; i < n_; ++i) p[i] = e[i] * g[i];
                    if (seen.insert(p).second) next.push_back(std::move(p));
                }
            frontier = std::move(next);
        }
        elements_.assign(seen.begin(), seen.end());
        // identity first, then lexicographic with +1 before -1
        std::sort(elements_.begin(), elements_.end(),
                  [](const std::vector<int>& a, const std::vector<int>& b) {
                      for (size_t i = 0; i < a.size(); ++i)
                          if (a[i] != b[i]) return a[i] > b[i];
                      return false;
                  });
    }

    int n_;
    std::vector<std::vector<int>> gens_;
    std::vector<std::vector<int>> elements_;
};

/// Vector of n jets, component i holding the coefficient of d/dx_i.
template <typename C>
struct VectorJet {
    std::vector<Jet<C>> components;

    int vars() const { return components.empty() ? 0 : components[0].vars(); }

    /// phi(gamma x) = gamma phi(x) for all group elements, checked per term.
    bool is_equivariant(const SignAction& action) const {
        for (int i = 0; i < static_cast<int>(components.size()); ++i)
            for (const auto& [m, c] : components[i].terms())
                if (!action.equivariant_for(m, i)) return false;
        return true;
    }
};

template <typename C>
VectorJet<C> monomial_field(int n, int order, int component, const MultiIndex& m) {
    VectorJet<C> v;
    for (int i = 0; i < n; ++i)
        v.components.push_back(i == component
                                   ? Jet<C>::monomial(n, order, m, coeff_traits<C>::from_int(1))
                                   : Jet<C>::zero(n, order));
    return v;
}

}  // namespace catkit
