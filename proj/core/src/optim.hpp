#pragma once

// Internal box-constrained minimizer: gradient projection with a limited
// memory BFGS model on the free variables and Armijo backtracking along the
// projected path. Deterministic. Used by the calibration fit and the
// trajectory planner; not part of the public API.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace climkit::detail {

using Eigen::VectorXd;

struct BoxMinOptions {
    int max_iterations = 2000;
    int max_evaluations = 5000;
    double grad_tol = 1e-9;       // on the infinity norm of the projected gradient
    double step_tol = 1e-10;      // on the parameter step
    double objective_tol = 1e-12; // on the objective decrease
    int history = 10;             // L-BFGS memory
    double armijo_c1 = 1e-4;
    int max_backtracks = 40;
};

struct BoxMinResult {
    VectorXd x;
    double value = 0.0;
    VectorXd gradient;
    double projected_grad_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

inline VectorXd clamp_box(const VectorXd& x, const VectorXd& lo, const VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// ||x - P(x - g)||_inf, the stationarity residual for box constraints.
inline double projected_gradient_norm(const VectorXd& x, const VectorXd& g, const VectorXd& lo,
                                      const VectorXd& hi) {
    return (x - clamp_box(x - g, lo, hi)).cwiseAbs().maxCoeff();
}

// fg(x, grad_out) -> f; when grad_out is null only the value is needed.
using ValueGrad = std::function<double(const VectorXd&, VectorXd*)>;

inline BoxMinResult minimize_box(const ValueGrad& fg, VectorXd x0, const VectorXd& lo,
                                 const VectorXd& hi, const BoxMinOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    BoxMinResult res;
    res.x = clamp_box(x0, lo, hi);

    VectorXd g(n);
    res.value = fg(res.x, &g);
    res.evaluations = 1;
    res.gradient = g;

    std::vector<VectorXd> s_hist, y_hist;
    std::vector<double> rho_hist;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        res.projected_grad_norm = projected_gradient_norm(res.x, g, lo, hi);
        if (res.projected_grad_norm < opts.grad_tol) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) break;

        // Variables pinned at a bound with the gradient pushing outward stay fixed.
        const double bound_eps = 1e-12;
        std::vector<char> active(n, 0);
        for (int i = 0; i < n; ++i) {
            if ((res.x[i] <= lo[i] + bound_eps && g[i] > 0) ||
                (res.x[i] >= hi[i] - bound_eps && g[i] < 0)) {
                active[i] = 1;
            }
        }

        VectorXd gf = g;
        for (int i = 0; i < n; ++i) {
            if (active[i]) gf[i] = 0.0;
        }

        // Two-loop recursion on the free subspace.
        VectorXd d = -gf;
        const int m = static_cast<int>(s_hist.size());
        if (m > 0) {
            std::vector<double> alpha(m);
            for (int k = m - 1; k >= 0; --k) {
                alpha[k] = rho_hist[k] * s_hist[k].dot(d);
                d -= alpha[k] * y_hist[k];
            }
            const double ys = y_hist[m - 1].dot(s_hist[m - 1]);
            const double yy = y_hist[m - 1].squaredNorm();
            if (yy > 0) d *= ys / yy;
            for (int k = 0; k < m; ++k) {
                const double beta = rho_hist[k] * y_hist[k].dot(d);
                d += (alpha[k] - beta) * s_hist[k];
            }
            for (int i = 0; i < n; ++i) {
                if (active[i]) d[i] = 0.0;
            }
        }
        double descent = d.dot(g);
        if (!(descent < 0.0)) {  // model failed; fall back to steepest descent
            d = -gf;
            descent = d.dot(g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            if (!(descent < 0.0)) break;
        }

        double step = 1.0;
        double f_new = res.value;
        VectorXd x_new = res.x;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = clamp_box(res.x + step * d, lo, hi);
            const double predicted = g.dot(x_new - res.x);
            if ((x_new - res.x).cwiseAbs().maxCoeff() == 0.0) break;
            f_new = fg(x_new, nullptr);
            ++res.evaluations;
            if (f_new <= res.value + opts.armijo_c1 * predicted) {
                accepted = true;
                break;
            }
            step *= 0.5;
            if (res.evaluations >= opts.max_evaluations) break;
        }
        if (!accepted) break;

        VectorXd g_new(n);
        const double f_check = fg(x_new, &g_new);
        ++res.evaluations;
        (void)f_check;

        const VectorXd s = x_new - res.x;
        const VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.history) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }

        const double f_drop = res.value - f_new;
        const double x_step = s.cwiseAbs().maxCoeff();
        res.x = x_new;
        res.value = f_new;
        g = g_new;
        res.gradient = g;

        if (x_step < opts.step_tol || f_drop < opts.objective_tol) {
            // stationary to within the requested step/objective resolution
            res.converged = true;
            break;
        }
    }
    res.projected_grad_norm = projected_gradient_norm(res.x, res.gradient, lo, hi);
    return res;
}

// Deterministic scalar minimizer on [lo, hi]: coarse scan then golden section.
inline double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              int scan_points = 64, double tol = 1e-10) {
    double best_x = lo, best_f = f(lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = lo + (hi - lo) * i / scan_points;
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    const double width = (hi - lo) / scan_points;
    double a = std::max(lo, best_x - width), b = std::min(hi, best_x + width);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    return f(mid) < best_f ? mid : best_x;
}

}  // namespace climkit::detail
