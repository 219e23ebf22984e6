#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace catkit {

namespace detail {

inline void make_primitive(std::vector<Rational>& v) {
    // clear denominators and divide out the content, keeping exact integers
    BigInt lcm = 1;
    for (const auto& q : v)
        if (!q.is_zero())
            lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(q));
    BigInt gcd = 0;
    std::vector<BigInt> w(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        w[i] = boost::multiprecision::numerator(v[i]) *
               (lcm / boost::multiprecision::denominator(v[i]));
        gcd = boost::multiprecision::gcd(gcd, w[i]);
    }
    if (gcd == 0) return;
    for (size_t i = 0; i < v.size(); ++i) v[i] = Rational(w[i] / gcd);
}

}  // namespace detail

/// Incremental row-echelon span with a caller-chosen column processing order.
/// The exact specialization keeps rows as primitive integer vectors and
/// eliminates by cross-multiplication (fraction-free); the float
/// specialization makes rank decisions against a tolerance relative to the
/// incoming row's magnitude, the column-pivoted-QR rank rule in elimination
/// form.
template <typename C>
class RowSpan {
public:
    RowSpan(int cols, std::vector<int> col_order, double tol = 1e-8)
        : cols_(cols), order_(std::move(col_order)), tol_(tol) {
        if (static_cast<int>(order_.size()) != cols_) throw std::invalid_argument("column order size");
    }
    explicit RowSpan(int cols, double tol = 1e-8) : cols_(cols), tol_(tol) {
        order_.resize(cols_);
        for (int i = 0; i < cols_; ++i) order_[i] = i;
    }

    int rank() const { return static_cast<int>(rows_.size()); }

    bool is_pivot(int col) const {
        for (int p : pivots_)
            if (p == col) return true;
        return false;
    }
    const std::vector<int>& pivots() const { return pivots_; }

    /// Reduce against the current span; returns the pivot column if the row
    /// adds a new direction (and absorbs it), nullopt if dependent.
    std::optional<int> add_row(std::vector<C> v) {
        double scale = row_scale(v);
        reduce(v, scale);
        int p = find_pivot(v, scale);
        if (p < 0) return std::nullopt;
        normalize(v, p);
        rows_.push_back(std::move(v));
        pivots_.push_back(p);
        return p;
    }

    bool contains(std::vector<C> v) const {
        double scale = row_scale(v);
        reduce(v, scale);
        return find_pivot(v, scale) < 0;
    }

private:
    static bool zero_entry(const Rational& x, double) { return x.is_zero(); }
    static bool zero_entry(double x, double scale) { return std::abs(x) <= scale; }

    double row_scale(const std::vector<C>& v) const {
        if constexpr (coeff_traits<C>::exact) {
            (void)v;
            return 0.0;
        } else {
            double m = 0;
            for (double x : v) m = std::max(m, std::abs(x));
            return tol_ * m;
        }
    }

    void reduce(std::vector<C>& v, double scale) const {
        for (size_t r = 0; r < rows_.size(); ++r) {
            int p = pivots_[r];
            if (zero_entry(v[p], scale)) continue;
            if constexpr (coeff_traits<C>::exact) {
                // v <- v * pivot - row * v[p], integers stay integers
                C vp = v[p], rp = rows_[r][p];
                for (int j = 0; j < cols_; ++j) v[j] = v[j] * rp - rows_[r][j] * vp;
                detail::make_primitive(v);
            } else {
                C f = v[p] / rows_[r][p];
                for (int j = 0; j < cols_; ++j) v[j] -= f * rows_[r][j];
                v[p] = 0;
            }
        }
    }

    int find_pivot(const std::vector<C>& v, double scale) const {
        for (int col : order_)
            if (!zero_entry(v[col], scale)) return col;
        return -1;
    }

    void normalize(std::vector<C>& v, int p) {
        if constexpr (coeff_traits<C>::exact) {
            detail::make_primitive(v);
            if (v[p] < 0)
                for (auto& x : v) x = -x;
        } else {
            C piv = v[p];
            for (auto& x : v) x /= piv;
        }
    }

    int cols_;
    std::vector<int> order_;
    double tol_;
    std::vector<std::vector<C>> rows_;
    std::vector<int> pivots_;
};

}  // namespace catkit
