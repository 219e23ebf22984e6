#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "multi_index.hpp"
#include "rational.hpp"

namespace catkit {

/// Truncated polynomial in n variables of total degree <= order, the
/// computational stand-in for a germ via its Taylor expansion. Terms with
/// exactly-zero coefficient are never stored, so equal jets have equal term
/// maps. Coefficients are exact rationals or IEEE doubles; the two kinds are
/// distinct types and never mix implicitly.
template <typename C>
class Jet {
public:
    using coeff_type = C;
    using term_map = std::map<MultiIndex, C, GrlexLess>;

    Jet() : n_(0), order_(0) {}
    Jet(int n, int order) : n_(n), order_(order) {
        if (n < 0 || order < 0) throw std::invalid_argument("bad jet shape");
    }

    static Jet zero(int n, int order) { return Jet(n, order); }
    static Jet constant(int n, int order, const C& c) {
        Jet j(n, order);
        j.set_coeff(MultiIndex::zero(n), c);
        return j;
    }
    static Jet monomial(int n, int order, const MultiIndex& m, const C& c) {
        Jet j(n, order);
        j.set_coeff(m, c);
        return j;
    }
    static Jet variable(int n, int order, int i) {
        return monomial(n, order, MultiIndex::unit(n, i), coeff_traits<C>::from_int(1));
    }

    int vars() const { return n_; }
    int order() const { return order_; }
    const term_map& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    C coeff(const MultiIndex& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? coeff_traits<C>::from_int(0) : it->second;
    }

    void set_coeff(const MultiIndex& m, const C& c) {
        if (m.size() != n_) throw std::invalid_argument("exponent arity mismatch");
        if (m.degree() > order_) {
            if (!coeff_traits<C>::is_zero(c))
                throw std::invalid_argument("term beyond truncation order");
            return;
        }
        if (coeff_traits<C>::is_zero(c))
            terms_.erase(m);
        else
            terms_[m] = c;
    }

    void add_term(const MultiIndex& m, const C& c) {
        if (m.degree() > order_) return;  // truncation
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!coeff_traits<C>::is_zero(c)) terms_.emplace(m, c);
        } else {
            it->second += c;
            if (coeff_traits<C>::is_zero(it->second)) terms_.erase(it);
        }
    }

    /// Lowest total degree among stored terms; order+1 for the zero jet.
    int min_degree() const {
        if (terms_.empty()) return order_ + 1;
        return terms_.begin()->first.degree();
    }

    bool operator==(const Jet& o) const {
        return n_ == o.n_ && order_ == o.order_ && terms_ == o.terms_;
    }
    bool operator!=(const Jet& o) const { return !(*this == o); }

    /// Keep only terms of total degree within [lo, hi].
    Jet graded_slice(int lo, int hi) const {
        Jet r(n_, order_);
        for (const auto& [m, c] : terms_) {
            int d = m.degree();
            if (d >= lo && d <= hi) r.terms_.emplace(m, c);
        }
        return r;
    }

    Jet truncated(int new_order) const {
        Jet r(n_, new_order);
        for (const auto& [m, c] : terms_)
            if (m.degree() <= new_order) r.terms_.emplace(m, c);
        return r;
    }

    Jet with_order(int new_order) const {  // raise or lower the ambient order
        return truncated(new_order);
    }

private:
    int n_;
    int order_;
    term_map terms_;
};

namespace detail {
template <typename C>
void require_compatible(const Jet<C>& a, const Jet<C>& b) {
    if (a.vars() != b.vars() || a.order() != b.order())
        throw std::invalid_argument("jet dimension/order mismatch");
}
}  // namespace detail

/// a + s*b
template <typename C>
Jet<C> jet_add_scale(const Jet<C>& a, const Jet<C>& b, const C& s) {
    detail::require_compatible(a, b);
    Jet<C> r = a;
    for (const auto& [m, c] : b.terms()) r.add_term(m, s * c);
    return r;
}

template <typename C>
Jet<C> operator+(const Jet<C>& a, const Jet<C>& b) {
    return jet_add_scale(a, b, coeff_traits<C>::from_int(1));
}
template <typename C>
Jet<C> operator-(const Jet<C>& a, const Jet<C>& b) {
    return jet_add_scale(a, b, coeff_traits<C>::from_int(-1));
}
template <typename C>
Jet<C> operator*(const C& s, const Jet<C>& a) {
    Jet<C> r(a.vars(), a.order());
    for (const auto& [m, c] : a.terms()) r.add_term(m, s * c);
    return r;
}

/// Product truncated at the shared order.
template <typename C>
Jet<C> jet_mul(const Jet<C>& a, const Jet<C>& b) {
    detail::require_compatible(a, b);
    Jet<C> r(a.vars(), a.order());
    for (const auto& [ma, ca] : a.terms()) {
        int da = ma.degree();
        for (const auto& [mb, cb] : b.terms()) {
            if (da + mb.degree() > a.order()) continue;
            r.add_term(ma.times(mb), ca * cb);
        }
    }
    return r;
}

template <typename C>
Jet<C> jet_pow(const Jet<C>& a, int p) {
    Jet<C> r = Jet<C>::constant(a.vars(), a.order(), coeff_traits<C>::from_int(1));
    for (int i = 0; i < p; ++i) r = jet_mul(r, a);
    return r;
}

/// Formal partial derivative with respect to variable i; stored at the same
/// ambient order.
template <typename C>
Jet<C> jet_partial(const Jet<C>& f, int i) {
    if (i < 0 || i >= f.vars()) throw std::out_of_range("variable index");
    Jet<C> r(f.vars(), f.order());
    for (const auto& [m, c] : f.terms()) {
        int e = m[i];
        if (e == 0) continue;
        r.add_term(m.lowered(i), c * coeff_traits<C>::from_int(e));
    }
    return r;
}

/// Substitution f(map_1,...,map_n) for origin-preserving maps. The result
/// lives in the map components' variable space. Truncation is applied at
/// every multiply, so the exact path stays exact.
template <typename C>
Jet<C> jet_compose(const Jet<C>& f, const std::vector<Jet<C>>& map) {
    if (static_cast<int>(map.size()) != f.vars())
        throw std::invalid_argument("map component count mismatch");
    int order = f.order();
    int m_vars = map.empty() ? 0 : map[0].vars();
    for (const auto& g : map) {
        if (g.vars() != m_vars || g.order() != order)
            throw std::invalid_argument("map component dimension/order mismatch");
        if (!coeff_traits<C>::is_zero(g.coeff(MultiIndex::zero(m_vars))))
            throw std::invalid_argument("composition map is not origin-preserving");
    }
    // memoized powers of each component
    std::vector<std::vector<Jet<C>>> pow(map.size());
    auto power = [&](int i, int p) -> const Jet<C>& {
        auto& cache = pow[i];
        if (cache.empty())
            cache.push_back(Jet<C>::constant(m_vars, order, coeff_traits<C>::from_int(1)));
        while (static_cast<int>(cache.size()) <= p) cache.push_back(jet_mul(cache.back(), map[i]));
        return cache[p];
    };
    Jet<C> r(m_vars, order);
    for (const auto& [m, c] : f.terms()) {
        Jet<C> term = Jet<C>::constant(m_vars, order, c);
        for (int i = 0; i < f.vars(); ++i)
            if (m[i] > 0) term = jet_mul(term, power(i, m[i]));
        r = r + term;
    }
    return r;
}

/// Set the variables listed in `kill` to zero, keeping the ambient arity.
template <typename C>
Jet<C> jet_zero_out(const Jet<C>& f, const std::vector<int>& kill) {
    std::vector<bool> dead(f.vars(), false);
    for (int i : kill) dead.at(i) = true;
    Jet<C> r(f.vars(), f.order());
    for (const auto& [m, c] : f.terms()) {
        bool keep = true;
        for (int i = 0; i < f.vars(); ++i)
            if (dead[i] && m[i] > 0) { keep = false; break; }
        if (keep) r.add_term(m, c);
    }
    return r;
}

/// Restrict to the subset of variables `keep` (all other variables set to 0),
/// reindexing into a jet in keep.size() variables.
template <typename C>
Jet<C> jet_restrict(const Jet<C>& f, const std::vector<int>& keep) {
    Jet<C> r(static_cast<int>(keep.size()), f.order());
    for (const auto& [m, c] : f.terms()) {
        bool pure = true;
        std::vector<int> e(keep.size(), 0);
        std::vector<bool> kept(f.vars(), false);
        for (size_t j = 0; j < keep.size(); ++j) {
            e[j] = m[keep[j]];
            kept[keep[j]] = true;
        }
        for (int i = 0; i < f.vars() && pure; ++i)
            if (!kept[i] && m[i] > 0) pure = false;
        if (pure) r.add_term(MultiIndex(std::move(e)), c);
    }
    return r;
}

/// Embed into a larger variable space; position[i] is the new index of old
/// variable i.
template <typename C>
Jet<C> jet_embed(const Jet<C>& f, int new_n, const std::vector<int>& position) {
    Jet<C> r(new_n, f.order());
    for (const auto& [m, c] : f.terms()) {
        std::vector<int> e(new_n, 0);
        for (int i = 0; i < f.vars(); ++i) e.at(position[i]) = m[i];
        r.add_term(MultiIndex(std::move(e)), c);
    }
    return r;
}

template <typename C>
C jet_eval(const Jet<C>& f, const std::vector<C>& x) {
    if (static_cast<int>(x.size()) != f.vars()) throw std::invalid_argument("eval arity");
    C total = coeff_traits<C>::from_int(0);
    for (const auto& [m, c] : f.terms()) {
        C v = c;
        for (int i = 0; i < f.vars(); ++i)
            for (int k = 0; k < m[i]; ++k) v *= x[i];
        total += v;
    }
    return total;
}

/// Explicit exact-to-float conversion (round to nearest double per term).
inline Jet<double> jet_to_double(const Jet<Rational>& f) {
    Jet<double> r(f.vars(), f.order());
    for (const auto& [m, c] : f.terms()) r.add_term(m, to_double(c));
    return r;
}

template <typename C>
std::string jet_str(const Jet<C>& f, const std::vector<std::string>& vars) {
    if (f.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : f.terms()) {
        std::string cs = coeff_traits<C>::str(c);
        bool neg = !cs.empty() && cs[0] == '-';
        if (s.empty()) {
            if (neg) { s += "-"; cs = cs.substr(1); }
        } else {
            s += neg ? " - " : " + ";
            if (neg) cs = cs.substr(1);
        }
        std::string ms = m.str(vars);
        if (ms == "1")
            s += cs;
        else if (cs == "1")
            s += ms;
        else
            s += cs + "*" + ms;
    }
    return s;
}

inline std::vector<std::string> default_var_names(int n) {
    static const char* names[] = {"x", "y", "z"};
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i)
        v.push_back(i < 3 ? names[i] : "x" + std::to_string(i + 1));
    return v;
}

}  // namespace catkit
