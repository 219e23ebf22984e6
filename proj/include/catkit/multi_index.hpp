#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace catkit {

/// Monomial exponent vector in a fixed number of variables.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents) : e_(std::move(exponents)) {
        for (int v : e_)
            if (v < 0) throw std::invalid_argument("negative exponent");
    }
    static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }
    static MultiIndex unit(int n, int i, int power = 1) {
        std::vector<int> e(n, 0);
        e.at(i) = power;
        return MultiIndex(std::move(e));
    }

    int size() const { return static_cast<int>(e_.size()); }
    int degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }
    int operator[](int i) const { return e_[i]; }
    const std::vector<int>& exponents() const { return e_; }

    bool divides(const MultiIndex& m) const {
        if (size() != m.size()) return false;
        for (int i = 0; i < size(); ++i)
            if (e_[i] > m.e_[i]) return false;
        return true;
    }
    MultiIndex quotient(const MultiIndex& divisor) const {
        std::vector<int> e(e_);
        for (int i = 0; i < size(); ++i) e[i] -= divisor.e_[i];
        return MultiIndex(std::move(e));
    }
    MultiIndex times(const MultiIndex& m) const {
        std::vector<int> e(e_);
        for (int i = 0; i < size(); ++i) e[i] += m.e_[i];
        return MultiIndex(std::move(e));
    }
    MultiIndex lowered(int i) const {  // used by formal differentiation
        std::vector<int> e(e_);
        if (e.at(i) == 0) throw std::logic_error("lowering zero exponent");
        --e[i];
        return MultiIndex(std::move(e));
    }

    bool operator==(const MultiIndex& o) const { return e_ == o.e_; }
    bool operator!=(const MultiIndex& o) const { return e_ != o.e_; }

    int distinct_vars() const {
        int k = 0;
        for (int v : e_) k += (v != 0);
        return k;
    }

    std::string str(const std::vector<std::string>& vars) const {
        std::string s;
        for (int i = 0; i < size(); ++i) {
            if (e_[i] == 0) continue;
            if (!s.empty()) s += "*";
            s += vars[i];
            if (e_[i] > 1) s += "^" + std::to_string(e_[i]);
        }
        return s.empty() ? "1" : s;
    }

private:
    std::vector<int> e_;
};

/// Graded lexicographic order: lower total degree first; within a degree the
/// lexicographically larger exponent vector comes first (x^4 < x^2y^2 < y^4).
inline bool grlex_less(const MultiIndex& a, const MultiIndex& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents() > b.exponents();
}

struct GrlexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return grlex_less(a, b); }
};

/// Pivoting order for complement selection: within a degree, monomials in
/// fewer variables are matched first so the mixed monomials survive into the
/// complement (this reproduces the classical unfolding monomial sets).
inline bool staircase_less(const MultiIndex& a, const MultiIndex& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    int va = a.distinct_vars(), vb = b.distinct_vars();
    if (va != vb) return va < vb;
    return a.exponents() > b.exponents();
}

/// All multi-indices of the given degree in n variables, graded-lex order.
inline void append_monomials_of_degree(int n, int degree, std::vector<MultiIndex>& out) {
    std::vector<int> e(n, 0);
    // lexicographically descending enumeration of compositions
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            e[pos] = remaining;
            out.emplace_back(e);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            e[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    if (n == 0) {
        if (degree == 0) out.emplace_back(std::vector<int>{});
        return;
    }
    rec(rec, 0, degree);
}

inline std::vector<MultiIndex> monomials_up_to(int n, int lo, int hi) {
    std::vector<MultiIndex> out;
    for (int d = lo; d <= hi; ++d) append_monomials_of_degree(n, d, out);
    return out;
}

}  // namespace catkit
