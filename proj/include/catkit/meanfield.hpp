#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "classify.hpp"

namespace catkit {

/// Couplings of the mean-field pressure function. The paper's symbols beta,
/// gamma, h collide with the classification modulus, group elements and shift
/// germ, hence the long field names.
struct MeanFieldParams {
    double beta = 1.0;  // inverse temperature, > 0
    double h = 0.0;     // external field
    double mu = 0.0;    // chemical potential
    double lam = 0.0;   // on-site coupling
    double gam = 0.0;   // pairing coupling
    double delt = 0.0;  // density coupling
    /// alternative reading of the printed pressure formula (the mu-term
    /// scaled by beta); identical to the printed form at beta = 1
    bool scale_mu_term_by_beta = false;

    void validate() const {
        if (!(beta > 0) || !std::isfinite(beta) || !std::isfinite(h) || !std::isfinite(mu) ||
            !std::isfinite(lam) || !std::isfinite(gam) || !std::isfinite(delt))
            throw std::invalid_argument("mean-field parameters: beta must be positive, all finite");
    }
};

namespace detail {

/// ln(cosh(bh) + e^{-lam b} cosh(bR)) and the normalized exponential ratios
/// used by the closed-form derivatives; safe for large arguments.
struct P0Terms {
    double ln_bracket;  // ln(cosh(bh) + e^{-lam b} cosh(bR))
    double X;           // e^{-lam b} cosh(bR) / bracket-denominator D
    double Y;           // e^{-lam b} sinh(bR) / D
    double Hc;          // cosh(bh) / D
    double Z;           // e^{-lam b} / D
    double q;           // e^{-lam b} sinh(bR)/(R D), smooth through R = 0
};

inline P0Terms p0_terms(double R, const MeanFieldParams& p) {
    const double b = p.beta;
    const double e1 = b * p.h, e2 = -b * p.h;
    const double e3 = b * R - p.lam * b, e4 = -b * R - p.lam * b;
    const double M = std::max({e1, e2, e3, e4});
    const double u1 = std::exp(e1 - M), u2 = std::exp(e2 - M);
    const double u3 = std::exp(e3 - M), u4 = std::exp(e4 - M);
    const double S = u1 + u2 + u3 + u4;  // = 2 D e^{-M}
    P0Terms t;
    t.ln_bracket = M + std::log(S / 2);
    t.X = (u3 + u4) / S;
    t.Y = (u3 - u4) / S;
    t.Hc = (u1 + u2) / S;
    t.Z = 2 * std::exp(-p.lam * b - M) / S;
    t.q = (b * R < 1e-8) ? b * t.X * (1 + (b * R) * (b * R) / 6) : t.Y / R;
    return t;
}

}  // namespace detail

/// Closed-form single-site pressure, Eq.-(21)-style: overflow-safe via
/// max-exponent normalization.
inline double pressure_p0(double c1, double c2, const MeanFieldParams& p) {
    p.validate();
    const double w = p.mu + 2 * p.delt * c2 - p.lam;
    const double R = std::hypot(w, p.gam * c1);
    const double mu_term = (p.mu + 2 * p.delt * c2) * (p.scale_mu_term_by_beta ? p.beta : 1.0);
    return -std::log(2.0) / p.beta + mu_term + detail::p0_terms(R, p).ln_bracket / p.beta;
}

/// Variational objective gamma c1^2 + delta c2^2 - P0; even in c1.
inline double mf_objective(double c1, double c2, const MeanFieldParams& p) {
    return p.gam * c1 * c1 + p.delt * c2 * c2 - pressure_p0(c1, c2, p);
}

/// Analytic gradient of the objective.
inline std::array<double, 2> mf_gradient(double c1, double c2, const MeanFieldParams& p) {
    const double w = p.mu + 2 * p.delt * c2 - p.lam;
    const double R = std::hypot(w, p.gam * c1);
    const auto t = detail::p0_terms(R, p);
    const double mu_scale = p.scale_mu_term_by_beta ? p.beta : 1.0;
    const double g1 = 2 * p.gam * c1 - t.q * p.gam * p.gam * c1;
    const double g2 = 2 * p.delt * c2 - 2 * p.delt * (mu_scale + w * t.q);
    return {g1, g2};
}

namespace detail {

/// Ratios (q, t', t'') of the axis pressure derivatives; the physical second
/// and third derivatives of the objective factor through these.
inline std::array<double, 3> mf_axis_tratios(double c2, const MeanFieldParams& p) {
    const double b = p.beta;
    const double w = p.mu + 2 * p.delt * c2 - p.lam;
    const auto t = p0_terms(std::abs(w), p);
    const double Y = (w >= 0) ? t.Y : -t.Y;  // sinh is odd
    const double tp = b * (t.X * t.Hc + t.Z * t.Z);
    const double tpp = b * b * Y * (t.Hc - 2 * (t.X * t.Hc + t.Z * t.Z));
    return {t.q, tp, tpp};
}

}  // namespace detail

/// Analytic second derivatives on the c1 = 0 axis (used by the degeneracy
/// tuner): d2/dc1^2, d2/dc2^2 and d3/dc2^3 of the objective.
inline std::array<double, 3> mf_axis_derivatives(double c2, const MeanFieldParams& p) {
    const auto [q, tp, tpp] = detail::mf_axis_tratios(c2, p);
    const double h11 = 2 * p.gam - p.gam * p.gam * q;
    const double h22 = 2 * p.delt - 4 * p.delt * p.delt * tp;
    const double b30 = -8 * p.delt * p.delt * p.delt * tpp;
    return {h11, h22, b30};
}

/// Strong-coupling pressure family, Eq.-(4)-style: one variable c with
/// parameters (u1, u2).
inline double strong_coupling_objective(double c, double u1, double u2) {
    const double S = std::hypot(u2, u1 * c);
    const double e1 = 0.0, e2 = S - u2, e3 = -S - u2;
    const double M = std::max({e1, e2, e3});
    const double sum = std::exp(e1 - M) + 0.5 * std::exp(e2 - M) + 0.5 * std::exp(e3 - M);
    return u1 * c * c - (M + std::log(sum));
}

inline double strong_coupling_derivative(double c, double u1, double u2) {
    const double S = std::hypot(u2, u1 * c);
    const double e1 = 0.0, e2 = S - u2, e3 = -S - u2;
    const double M = std::max({e1, e2, e3});
    const double v1 = std::exp(e1 - M), v2 = 0.5 * std::exp(e2 - M), v3 = 0.5 * std::exp(e3 - M);
    const double D = v1 + v2 + v3;
    // e^{-u2} sinh(S)/(S D), smooth through S = 0
    const double qS = (S < 1e-8) ? std::exp(-u2 - M) / D * (1 + S * S / 6)
                                 : (v2 - v3) / (S * D);
    return 2 * u1 * c - qS * u1 * u1 * c;
}

/// c^2 and c^4 Taylor coefficients of the strong-coupling family at c = 0
/// (closed forms; used by the organizing-center tuner, u2 > 0).
inline std::array<double, 2> strong_coupling_a2_a4(double u1, double u2) {
    const double s = std::abs(u2);
    const double D = 1 + std::exp(-u2) * std::cosh(s);
    const double Lp = std::exp(-u2) * std::sinh(s) / D;
    const double Lpp = std::exp(-u2) * (std::cosh(s) + std::exp(-u2)) / (D * D);
    const double a2 = u1 - Lp * u1 * u1 / (2 * s);
    const double a4 = (u1 * u1 * u1 * u1 / (8 * s * s)) * (Lp / s - Lpp);
    return {a2, a4};
}

/// A smooth objective the local machinery can expand, minimize and classify.
/// Built-in models: "meanfield" (dim 2) and "strong_coupling" (dim 1); any
/// callback with the same shape works.
struct ObjectiveModel {
    std::string name;
    int dim = 2;
    std::vector<std::string> param_names;
    std::function<double(const std::vector<double>&, const std::vector<double>&)> value;
    /// analytic gradient; empty falls back to central differences
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)> gradient;
    /// parameters used as unfolding directions by the classification hookup
    std::vector<std::string> unfolding_params;
};

inline std::vector<double> params_to_vector(const MeanFieldParams& p) {
    return {p.beta, p.h, p.mu, p.lam, p.gam, p.delt};
}

inline MeanFieldParams params_from_vector(const std::vector<double>& v, bool alt_mu = false) {
    MeanFieldParams p;
    p.beta = v.at(0);
    p.h = v.at(1);
    p.mu = v.at(2);
    p.lam = v.at(3);
    p.gam = v.at(4);
    p.delt = v.at(5);
    p.scale_mu_term_by_beta = alt_mu;
    return p;
}

inline ObjectiveModel meanfield_model(bool scale_mu_term_by_beta = false) {
    ObjectiveModel m;
    m.name = "meanfield";
    m.dim = 2;
    m.param_names = {"beta", "h", "mu", "lam", "gam", "delt"};
    m.unfolding_params = {"lam", "gam", "delt"};
    m.value = [scale_mu_term_by_beta](const std::vector<double>& c, const std::vector<double>& pv) {
        return mf_objective(c[0], c[1], params_from_vector(pv, scale_mu_term_by_beta));
    };
    m.gradient = [scale_mu_term_by_beta](const std::vector<double>& c, const std::vector<double>& pv) {
        auto g = mf_gradient(c[0], c[1], params_from_vector(pv, scale_mu_term_by_beta));
        return std::vector<double>{g[0], g[1]};
    };
    return m;
}

inline ObjectiveModel strong_coupling_model() {
    ObjectiveModel m;
    m.name = "strong_coupling";
    m.dim = 1;
    m.param_names = {"u1", "u2"};
    m.unfolding_params = {"u1", "u2"};
    m.value = [](const std::vector<double>& c, const std::vector<double>& p) {
        return strong_coupling_objective(c[0], p.at(0), p.at(1));
    };
    m.gradient = [](const std::vector<double>& c, const std::vector<double>& p) {
        return std::vector<double>{strong_coupling_derivative(c[0], p.at(0), p.at(1))};
    };
    return m;
}

// ---------------------------------------------------------------------------
// critical points

struct CriticalPoint {
    std::vector<double> c;
    double value = 0;
    double grad_norm = 0;
    std::vector<double> hess_eigs;
    bool degenerate = false;
};

struct CriticalOptions {
    int seeds_per_axis = 21;
    int max_newton_iters = 80;
    double grad_tol = 1e-11;
    double dedupe_tol = 1e-6;
    double degenerate_tol = 1e-6;  // threshold on min |Hessian eigenvalue|
};

namespace detail {

inline std::vector<double> model_gradient(const ObjectiveModel& m, const std::vector<double>& c,
                                          const std::vector<double>& p) {
    if (m.gradient) return m.gradient(c, p);
    std::vector<double> g(m.dim);
    const double h = 1e-6;
    for (int i = 0; i < m.dim; ++i) {
        auto cp = c, cm = c;
        cp[i] += h;
        cm[i] -= h;
        g[i] = (m.value(cp, p) - m.value(cm, p)) / (2 * h);
    }
    return g;
}

inline std::vector<std::vector<double>> model_hessian(const ObjectiveModel& m,
                                                      const std::vector<double>& c,
                                                      const std::vector<double>& p) {
    const double h = 1e-5;
    std::vector<std::vector<double>> H(m.dim, std::vector<double>(m.dim));
    for (int j = 0; j < m.dim; ++j) {
        auto cp = c, cm = c;
        cp[j] += h;
        cm[j] -= h;
        auto gp = model_gradient(m, cp, p), gm = model_gradient(m, cm, p);
        for (int i = 0; i < m.dim; ++i) H[i][j] = (gp[i] - gm[i]) / (2 * h);
    }
    for (int i = 0; i < m.dim; ++i)
        for (int j = i + 1; j < m.dim; ++j) H[i][j] = H[j][i] = 0.5 * (H[i][j] + H[j][i]);
    return H;
}

inline std::vector<double> sym_eigenvalues(const std::vector<std::vector<double>>& H) {
    if (H.size() == 1) return {H[0][0]};
    const double a = H[0][0], b = H[0][1], d = H[1][1];
    const double tr = a + d, disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4 * b * b));
    return {(tr - disc) / 2, (tr + disc) / 2};
}

inline bool newton_refine(const ObjectiveModel& m, const std::vector<double>& p,
                          std::vector<double>& c, const CriticalOptions& opts, double box_scale) {
    for (int it = 0; it < opts.max_newton_iters; ++it) {
        auto g = model_gradient(m, c, p);
        double gn = 0;
        for (double v : g) gn = std::max(gn, std::abs(v));
        if (gn < opts.grad_tol) return true;
        auto H = model_hessian(m, c, p);
        std::vector<double> step(m.dim, 0.0);
        if (m.dim == 1) {
            if (H[0][0] == 0) return false;
            step[0] = -g[0] / H[0][0];
        } else {
            double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
            if (std::abs(det) < 1e-300) return false;
            step[0] = -(H[1][1] * g[0] - H[0][1] * g[1]) / det;
            step[1] = -(-H[1][0] * g[0] + H[0][0] * g[1]) / det;
        }
        double sn = 0;
        for (double v : step) sn = std::max(sn, std::abs(v));
        if (sn > box_scale) {  // damping: cap the step
            for (double& v : step) v *= box_scale / sn;
        }
        for (int i = 0; i < m.dim; ++i) c[i] += step[i];
        if (!std::isfinite(c[0])) return false;
    }
    auto g = model_gradient(m, c, p);
    double gn = 0;
    for (double v : g) gn = std::max(gn, std::abs(v));
    return gn < 1e3 * opts.grad_tol;
}

}  // namespace detail

struct SearchBox {
    std::vector<double> lo, hi;  // per dimension
    static SearchBox square(int dim, double a, double b) {
        SearchBox s;
        s.lo.assign(dim, a);
        s.hi.assign(dim, b);
        return s;
    }
};

/// Multistart damped Newton on the gradient from a coarse seed grid; each
/// point annotated with the Hessian spectrum and degeneracy flag.
inline std::vector<CriticalPoint> find_critical_points(const ObjectiveModel& m,
                                                       const std::vector<double>& p,
                                                       const SearchBox& box,
                                                       const CriticalOptions& opts = {}) {
    std::vector<CriticalPoint> found;
    double box_scale = 0;
    for (int i = 0; i < m.dim; ++i) box_scale = std::max(box_scale, box.hi[i] - box.lo[i]);

    std::vector<std::vector<double>> seeds;
    std::vector<double> c(m.dim, 0.0);
    auto push_seeds = [&](auto&& self, int d) -> void {
        if (d == m.dim) {
            seeds.push_back(c);
            return;
        }
        for (int i = 0; i < opts.seeds_per_axis; ++i) {
            c[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * i / double(opts.seeds_per_axis - 1);
            self(self, d + 1);
        }
    };
    push_seeds(push_seeds, 0);

    for (auto seed : seeds) {
        if (!detail::newton_refine(m, p, seed, opts, box_scale)) continue;
        bool inside = true;
        for (int i = 0; i < m.dim; ++i) {
            double margin = 0.1 * (box.hi[i] - box.lo[i]);
            if (seed[i] < box.lo[i] - margin || seed[i] > box.hi[i] + margin) inside = false;
        }
        if (!inside) continue;
        bool dup = false;
        for (const auto& q : found) {
            double dist = 0;
            for (int i = 0; i < m.dim; ++i) dist = std::max(dist, std::abs(q.c[i] - seed[i]));
            if (dist < opts.dedupe_tol) { dup = true; break; }
        }
        if (dup) continue;
        CriticalPoint cp;
        cp.c = seed;
        cp.value = m.value(seed, p);
        auto g = detail::model_gradient(m, seed, p);
        for (double v : g) cp.grad_norm = std::max(cp.grad_norm, std::abs(v));
        cp.hess_eigs = detail::sym_eigenvalues(detail::model_hessian(m, seed, p));
        double mineig = std::abs(cp.hess_eigs[0]);
        for (double e : cp.hess_eigs) mineig = std::min(mineig, std::abs(e));
        cp.degenerate = mineig < opts.degenerate_tol;
        found.push_back(std::move(cp));
    }
    std::sort(found.begin(), found.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.c < b.c; });
    return found;
}

// ---------------------------------------------------------------------------
// Taylor expansion by nested central differences with Richardson extrapolation

struct TaylorOptions {
    double h0 = 1e-2;            // base step (times the per-direction scale)
    double scale = 1.0;          // feature scale of the variables
    double residual_gate = 1e-5; // parity residual above which a warning is set
};

struct TaylorResult {
    Jet<double> jet;         // fully parity-projected, constant term dropped
    Jet<double> raw;         // unprojected (constant dropped)
    double residual = 0;     // relative size of the projected-away content
    bool warning = false;    // residual above the gate
};

namespace detail {

inline const std::vector<std::vector<double>>& central_weights() {
    // derivative orders 1..6 at O(h^2) accuracy, offsets -3..3
    static const std::vector<std::vector<double>> w = {
        {0, 0, -0.5, 0, 0.5, 0, 0},
        {0, 0, 1, -2, 1, 0, 0},
        {0, -0.5, 1, 0, -1, 0.5, 0},
        {0, 1, -4, 6, -4, 1, 0},
        {-0.5, 2, -2.5, 0, 2.5, -2, 0.5},
        {1, -6, 15, -20, 15, -6, 1},
    };
    return w;
}

inline double stencil_1d(const std::vector<double>& vals, int order, double h) {
    if (order == 0) return vals[3];
    const auto& w = central_weights()[order - 1];
    double s = 0;
    for (int i = 0; i < 7; ++i)
        if (w[i] != 0) s += w[i] * vals[i];
    return s / std::pow(h, order);
}

}  // namespace detail

/// Taylor coefficients of the objective about a point, to total order <= 6.
/// Two step sizes (h and h/2) are combined by Richardson extrapolation; the
/// constant term is dropped and the result is Reynolds-projected onto the
/// parity-invariant part with the residual reported.
inline TaylorResult taylor_at(const ObjectiveModel& m, const std::vector<double>& p,
                              const std::vector<double>& point, int order,
                              const TaylorOptions& topt = {}) {
    if (order > 6 || order < 2) throw std::invalid_argument("taylor order must be in [2,6]");
    const int dim = m.dim;
    const double h0 = topt.h0 * topt.scale;

    auto coeffs_at = [&](double h) {
        // one shared 7 (x 7) evaluation grid
        std::vector<double> grid(dim == 1 ? 7 : 49);
        for (int a = -3; a <= 3; ++a) {
            if (dim == 1) {
                grid[a + 3] = m.value({point[0] + a * h}, p);
            } else {
                for (int b = -3; b <= 3; ++b)
                    grid[(a + 3) * 7 + (b + 3)] = m.value({point[0] + a * h, point[1] + b * h}, p);
            }
        }
        std::map<MultiIndex, double, GrlexLess> out;
        if (dim == 1) {
            for (int j = 1; j <= order; ++j) {
                double d = detail::stencil_1d(grid, j, h);
                out[MultiIndex({j})] = d / std::tgamma(j + 1.0);
            }
        } else {
            for (int j = 0; j <= order; ++j)
                for (int k = 0; j + k <= order; ++k) {
                    if (j + k == 0) continue;
                    // apply the y-stencil along each row, then the x-stencil
                    std::vector<double> col(7);
                    for (int a = 0; a < 7; ++a) {
                        std::vector<double> row(grid.begin() + a * 7, grid.begin() + (a + 1) * 7);
                        col[a] = detail::stencil_1d(row, k, h);
                    }
                    double d = detail::stencil_1d(col, j, h);
                    out[MultiIndex({j, k})] = d / (std::tgamma(j + 1.0) * std::tgamma(k + 1.0));
                }
        }
        return out;
    };

    auto ch = coeffs_at(h0);
    auto ch2 = coeffs_at(h0 / 2);
    Jet<double> raw(dim, order);
    for (const auto& [mi, v] : ch) {
        double refined = (4 * ch2.at(mi) - v) / 3;  // cancels the O(h^2) error
        raw.add_term(mi, refined);
    }

    TaylorResult res;
    res.raw = raw;
    auto action = SignAction::full(dim);
    res.jet = action.reynolds(raw);
    res.residual = SignAction::symmetry_residual(raw, action);
    res.warning = res.residual > topt.residual_gate;
    return res;
}

// ---------------------------------------------------------------------------
// degeneracy tuners

struct DegenerateTuning {
    MeanFieldParams params;
    double c2_star = 0;
    std::array<double, 3> residuals{};  // (H11, H22, d3/dc2^3) at the solution
    bool converged = false;
};

namespace detail {

inline double track_c2_critical(const MeanFieldParams& p, double c2_guess) {
    double c2 = c2_guess;
    for (int it = 0; it < 100; ++it) {
        double g = mf_gradient(0.0, c2, p)[1];
        double h2 = mf_axis_derivatives(c2, p)[1];
        if (h2 == 0) break;
        double step = -g / h2;
        if (std::abs(step) > 1.0) step = step > 0 ? 1.0 : -1.0;
        c2 += step;
        if (std::abs(step) < 1e-14 * (1 + std::abs(c2))) break;
    }
    return c2;
}

}  // namespace detail

/// Root-solve on (lam, gam, delt) driving both Hessian eigenvalues and the
/// third c2-derivative of the objective to zero at the tracked on-axis
/// critical point. The third condition fixes the remaining coupling so the
/// expansion is as parity-symmetric in c2 as this model allows.
inline DegenerateTuning tune_degenerate_point(MeanFieldParams base, double lam0 = 3.6,
                                              double gam0 = 17.0, double delt0 = 2.0,
                                              double c2_guess = 1.5) {
    DegenerateTuning tun;
    std::array<double, 3> x{lam0, gam0, delt0};
    double c2 = c2_guess;

    // residuals with the trivial gam = 0 / delt = 0 roots divided out:
    // (2 - gam q, 1 - 2 delt t', t'') vanish exactly where both Hessian
    // eigenvalues and the third c2-derivative do, and nowhere spurious
    auto residuals = [&](const std::array<double, 3>& v, double& c2_out) {
        MeanFieldParams p = base;
        p.lam = v[0];
        p.gam = v[1];
        p.delt = v[2];
        c2_out = detail::track_c2_critical(p, c2);
        auto [q, tp, tpp] = detail::mf_axis_tratios(c2_out, p);
        return std::array<double, 3>{2 - v[1] * q, 1 - 2 * v[2] * tp, tpp};
    };

    for (int it = 0; it < 60; ++it) {
        double c2_here;
        auto r = residuals(x, c2_here);
        c2 = c2_here;
        double rn = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
        if (rn < 1e-11) {
            tun.converged = true;
            break;
        }
        // finite-difference Jacobian
        double J[3][3];
        for (int j = 0; j < 3; ++j) {
            auto xp = x, xm = x;
            double step = 1e-7 * (1 + std::abs(x[j]));
            xp[j] += step;
            xm[j] -= step;
            double dummy;
            auto rp = residuals(xp, dummy), rm = residuals(xm, dummy);
            for (int i = 0; i < 3; ++i) J[i][j] = (rp[i] - rm[i]) / (2 * step);
        }
        // solve J s = -r by Gaussian elimination
        double A[3][4];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[i][j] = J[i][j];
            A[i][3] = -r[i];
        }
        for (int k = 0; k < 3; ++k) {
            int piv = k;
            for (int i = k + 1; i < 3; ++i)
                if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
            std::swap(A[k], A[piv]);
            if (A[k][k] == 0) break;
            for (int i = k + 1; i < 3; ++i) {
                double f = A[i][k] / A[k][k];
                for (int j = k; j < 4; ++j) A[i][j] -= f * A[k][j];
            }
        }
        double s[3];
        for (int i = 2; i >= 0; --i) {
            double acc = A[i][3];
            for (int j = i + 1; j < 3; ++j) acc -= A[i][j] * s[j];
            s[i] = A[i][i] == 0 ? 0 : acc / A[i][i];
        }
        double cap = 0.5 * (1 + std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]));
        double sn = std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
        if (sn > cap)
            for (double& v : s) v *= cap / sn;
        for (int i = 0; i < 3; ++i) x[i] += s[i];
    }

    tun.params = base;
    tun.params.lam = x[0];
    tun.params.gam = x[1];
    tun.params.delt = x[2];
    tun.c2_star = detail::track_c2_critical(tun.params, c2);
    tun.residuals = mf_axis_derivatives(tun.c2_star, tun.params);
    return tun;
}

struct StrongCouplingTuning {
    double u1 = 0, u2 = 0;
    std::array<double, 2> residuals{};
    bool converged = false;
};

/// Organizing center of the strong-coupling family: both the c^2 and c^4
/// Taylor coefficients vanish at c = 0.
inline StrongCouplingTuning tune_strong_coupling(double u1_0 = 6.0, double u2_0 = 0.8) {
    StrongCouplingTuning t;
    double u1 = u1_0, u2 = u2_0;
    for (int it = 0; it < 60; ++it) {
        auto r = strong_coupling_a2_a4(u1, u2);
        if (std::max(std::abs(r[0]), std::abs(r[1])) < 1e-12) {
            t.converged = true;
            break;
        }
        const double h1 = 1e-7 * (1 + std::abs(u1)), h2 = 1e-7 * (1 + std::abs(u2));
        auto r1p = strong_coupling_a2_a4(u1 + h1, u2), r1m = strong_coupling_a2_a4(u1 - h1, u2);
        auto r2p = strong_coupling_a2_a4(u1, u2 + h2), r2m = strong_coupling_a2_a4(u1, u2 - h2);
        const double a = (r1p[0] - r1m[0]) / (2 * h1), b = (r2p[0] - r2m[0]) / (2 * h2);
        const double c = (r1p[1] - r1m[1]) / (2 * h1), d = (r2p[1] - r2m[1]) / (2 * h2);
        const double det = a * d - b * c;
        if (det == 0) break;
        u1 -= (d * r[0] - b * r[1]) / det;
        u2 -= (-c * r[0] + a * r[1]) / det;
        if (u2 < 1e-3) u2 = 1e-3;  // keep off the trivial u1->0 collapse
    }
    t.u1 = u1;
    t.u2 = u2;
    t.residuals = strong_coupling_a2_a4(u1, u2);
    return t;
}

// ---------------------------------------------------------------------------
// classification hookup

struct MfClassifyOptions {
    int taylor_order = 6;
    TaylorOptions taylor;
    double degenerate_tol = 1e-6;  // quadratic coefficients below this are kernel
    double zero_tol = 3e-5;        // relative 4-jet zero threshold (FD noise adapted)
    double alpha_step = 1e-3;      // coupling step for the unfolding directions
    CodimOptions codim;
};

struct MfClassification {
    ClassificationResult germ;
    TaylorResult taylor;
    bool transversality_computed = false;
    TransversalityReport transversality;
};

/// Expand the objective at a critical point, project, classify the germ, and
/// test transversality of the coupling-parameter unfolding.
inline MfClassification classify_critical_point(const ObjectiveModel& m,
                                                const std::vector<double>& pv,
                                                const std::vector<double>& point,
                                                const MfClassifyOptions& opts = {}) {
    MfClassification out;
    out.taylor = taylor_at(m, pv, point, opts.taylor_order, opts.taylor);

    // kernel cleanup: quadratic coefficients below the degeneracy threshold
    Jet<double> cleaned = out.taylor.jet;
    for (int i = 0; i < m.dim; ++i) {
        MultiIndex mi = MultiIndex::unit(m.dim, i, 2);
        if (std::abs(2 * cleaned.coeff(mi)) < opts.degenerate_tol) cleaned.set_coeff(mi, 0.0);
    }
    auto action = SignAction::full(m.dim);
    ClassifyOptions copt;
    copt.zero_tol = opts.zero_tol;
    copt.codim = opts.codim;
    out.germ = classify_germ(cleaned, action, copt);
    out.germ.symmetrization_residual = out.taylor.residual;
    out.germ.residual_warning = out.taylor.warning;

    // transversality of the coupling unfolding at the matched order
    if (out.germ.sigma > 0 && out.germ.sigma <= opts.taylor_order &&
        out.germ.family != GermFamily::beyond_table && out.germ.family != GermFamily::morse) {
        Unfolding<double> u;
        u.base = cleaned.truncated(std::max(out.germ.sigma, 4));
        for (const auto& pname : m.unfolding_params) {
            auto it = std::find(m.param_names.begin(), m.param_names.end(), pname);
            size_t idx = it - m.param_names.begin();
            ObjectiveModel diff = m;
            double step = opts.alpha_step * (1 + std::abs(pv[idx]));
            diff.gradient = {};
            diff.value = [&m, idx, step](const std::vector<double>& c, const std::vector<double>& p) {
                auto pp = p, pm = p;
                pp[idx] += step;
                pm[idx] -= step;
                return (m.value(c, pp) - m.value(c, pm)) / (2 * step);
            };
            auto a = taylor_at(diff, pv, point, std::max(out.germ.sigma, 4), opts.taylor);
            Jet<double> alpha = a.jet;
            // the constant part of alpha matters for transversality; restore it
            alpha.set_coeff(MultiIndex::zero(m.dim), diff.value(point, pv));
            u.alphas.push_back(alpha.truncated(u.base.order()));
            u.param_names.push_back(pname);
        }
        try {
            out.transversality = is_transversal(u, action, opts.codim);
            out.transversality_computed = true;
        } catch (const std::exception&) {
            out.transversality_computed = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// phase diagrams

struct SweepAxis {
    std::string param;
    double lo = 0, hi = 0, step = 1;

    int count() const { return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1; }
    double at(int i) const { return lo + i * step; }
};

struct PhaseCell {
    double p1 = 0, p2 = 0;
    std::vector<double> c;
    double value = 0;
    std::string phase = "failed";
    bool solver_ok = false;
    bool first_order_edge = false;
    bool second_order_edge = false;
};

struct PhaseDiagram {
    SweepAxis axis1, axis2;
    int n1 = 0, n2 = 0;
    std::vector<PhaseCell> cells;  // row-major: axis1 outer, axis2 inner

    const PhaseCell& at(int i, int j) const { return cells[i * n2 + j]; }
};

struct PhaseOptions {
    SearchBox box;             // minimization box per cell
    int seeds_per_axis = 41;   // coarse grid resolution for the global search
    double c1_tol = 1e-6;      // |c1| above this counts as the paired phase
    int jobs = 1;
    double jump_factor = 10;   // first-order when the minimizer jumps by more
                               // than jump_factor * seed spacing
};

namespace detail {

inline PhaseCell minimize_cell(const ObjectiveModel& m, std::vector<double> pv,
                               const PhaseOptions& opts) {
    PhaseCell cell;
    // coarse grid; ties broken toward the symmetric phase (smallest |c1|),
    // which settles flat directions such as gam = 0 deterministically
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> bestc(m.dim, 0.0);
    std::vector<double> c(m.dim, 0.0);
    auto scan = [&](auto&& self, int d) -> void {
        if (d == m.dim) {
            double v = m.value(c, pv);
            if (!std::isfinite(best)) {
                best = v;
                bestc = c;
                return;
            }
            double tie = 1e-12 * (1 + std::abs(best));
            if (v < best - tie || (v <= best + tie && std::abs(c[0]) < std::abs(bestc[0]))) {
                best = v;
                bestc = c;
            }
            return;
        }
        for (int i = 0; i < opts.seeds_per_axis; ++i) {
            c[d] = opts.box.lo[d] +
                   (opts.box.hi[d] - opts.box.lo[d]) * i / double(opts.seeds_per_axis - 1);
            self(self, d + 1);
        }
    };
    scan(scan, 0);

    // Newton refinement of the best seed (falls back to the seed on failure)
    CriticalOptions copt;
    copt.max_newton_iters = 40;
    std::vector<double> refined = bestc;
    double box_scale = 0;
    for (int i = 0; i < m.dim; ++i) box_scale = std::max(box_scale, opts.box.hi[i] - opts.box.lo[i]);
    bool ok = detail::newton_refine(m, pv, refined, copt, 0.25 * box_scale);
    double tie = 1e-12 * (1 + std::abs(best));
    double refined_value = ok ? m.value(refined, pv) : std::numeric_limits<double>::infinity();
    if (ok && (refined_value < best - tie ||
               (refined_value <= best + tie && std::abs(refined[0]) <= std::abs(bestc[0]) + tie))) {
        cell.c = refined;
        cell.value = refined_value;
    } else {
        cell.c = bestc;
        cell.value = best;
    }
    cell.solver_ok = true;
    cell.phase = std::abs(cell.c[0]) > opts.c1_tol ? "paired" : "normal";
    return cell;
}

}  // namespace detail

/// Sweep two named parameters over rectangular grids; per cell the global
/// minimizer and phase label, with first/second-order transition flags on
/// adjacent cells whose labels differ. The transition-order rule is a
/// documented heuristic: a jump in |c1| larger than jump_factor times the
/// seed-grid spacing marks a first-order edge, anything smaller that crosses
/// the |c1| tolerance marks a second-order edge.
inline PhaseDiagram phase_diagram(const ObjectiveModel& m, const std::vector<double>& base,
                                  const SweepAxis& axis1, const SweepAxis& axis2,
                                  const PhaseOptions& opts) {
    auto index_of = [&](const std::string& name) {
        auto it = std::find(m.param_names.begin(), m.param_names.end(), name);
        if (it == m.param_names.end())
            throw std::invalid_argument("unknown sweep parameter: " + name);
        return static_cast<size_t>(it - m.param_names.begin());
    };
    const size_t i1 = index_of(axis1.param), i2 = index_of(axis2.param);

    PhaseDiagram pd;
    pd.axis1 = axis1;
    pd.axis2 = axis2;
    pd.n1 = axis1.count();
    pd.n2 = axis2.count();
    pd.cells.resize(static_cast<size_t>(pd.n1) * pd.n2);

    auto run_range = [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i)
            for (int j = 0; j < pd.n2; ++j) {
                auto pv = base;
                pv[i1] = axis1.at(i);
                pv[i2] = axis2.at(j);
                PhaseCell cell = detail::minimize_cell(m, pv, opts);
                cell.p1 = axis1.at(i);
                cell.p2 = axis2.at(j);
                pd.cells[static_cast<size_t>(i) * pd.n2 + j] = std::move(cell);
            }
    };
    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        run_range(0, pd.n1);
    } else {
        std::vector<std::thread> pool;
        int chunk = (pd.n1 + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            int b = t * chunk, e = std::min(pd.n1, b + chunk);
            if (b < e) pool.emplace_back(run_range, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // transition edges between adjacent cells (deterministic row-major pass)
    double spacing = 0;
    for (int d = 0; d < m.dim; ++d)
        spacing = std::max(spacing, (opts.box.hi[d] - opts.box.lo[d]) / (opts.seeds_per_axis - 1));
    const double jump = opts.jump_factor * spacing;
    auto mark = [&](PhaseCell& a, PhaseCell& b) {
        if (!a.solver_ok || !b.solver_ok || a.phase == b.phase) return;
        double dc1 = std::abs(std::abs(a.c[0]) - std::abs(b.c[0]));
        if (dc1 > jump) {
            a.first_order_edge = b.first_order_edge = true;
        } else {
            a.second_order_edge = b.second_order_edge = true;
        }
    };
    for (int i = 0; i < pd.n1; ++i)
        for (int j = 0; j < pd.n2; ++j) {
            if (j + 1 < pd.n2) mark(pd.cells[i * pd.n2 + j], pd.cells[i * pd.n2 + j + 1]);
            if (i + 1 < pd.n1) mark(pd.cells[i * pd.n2 + j], pd.cells[(i + 1) * pd.n2 + j]);
        }
    return pd;
}

}  // namespace catkit
