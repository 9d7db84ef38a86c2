#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "surfsim/experiment.hpp"
#include "surfsim/rng.hpp"

namespace surfsim {

// Quadratic universal-scaling ansatz around the crossing:
//   p_l = A + B*x + C*x^2,   x = (p - p_th) * d^(1/nu0).
struct FitResult {
    double p_th = 0.0, p_th_err = 0.0;
    double nu0 = 0.0, nu0_err = 0.0;
    double A = 0.0, B = 0.0, C = 0.0;
    double A_err = 0.0, B_err = 0.0, C_err = 0.0;
    double chi2 = 0.0;
    double r2 = 0.0;
    int dof = 0;
    int points_used = 0;
    bool good = false;  // r2 >= 0.999 and the solver converged
    bool converged = false;
};

namespace fitdetail {

struct Obs {
    double p, y, sigma;
    int d;
};

inline double scale_x(double p, int d, double p_th, double nu0) {
    return (p - p_th) * std::pow(static_cast<double>(d), 1.0 / nu0);
}

// Gaussian elimination with partial pivoting; A is n x n row-major.
inline bool solve_linear(std::vector<double> A, std::vector<double> b,
                         std::vector<double>& x, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
        if (std::fabs(A[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[r * n + col] / A[col * n + col];
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int i = 0; i < n; ++i) x[i] = b[i] / A[i * n + i];
    return true;
}

inline bool invert(const std::vector<double>& M, std::vector<double>& inv, int n) {
    std::vector<double> A = M;
    inv.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
        if (std::fabs(A[piv * n + col]) < 1e-300) return false;
        if (piv != col)
            for (int c = 0; c < n; ++c) {
                std::swap(A[col * n + c], A[piv * n + c]);
                std::swap(inv[col * n + c], inv[piv * n + c]);
            }
        double diag = A[col * n + col];
        for (int c = 0; c < n; ++c) {
            A[col * n + c] /= diag;
            inv[col * n + c] /= diag;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[r * n + col];
            for (int c = 0; c < n; ++c) {
                A[r * n + c] -= f * A[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return true;
}

// Weighted linear LS for (A,B,C) at fixed (p_th, nu0); returns chi2.
inline double inner_fit(const std::vector<Obs>& obs, double p_th, double nu0,
                        double abc[3]) {
    std::vector<double> N(9, 0.0), rhs(3, 0.0), sol;
    for (const auto& o : obs) {
        double x = scale_x(o.p, o.d, p_th, nu0);
        double basis[3] = {1.0, x, x * x};
        double w = 1.0 / (o.sigma * o.sigma);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) N[i * 3 + j] += w * basis[i] * basis[j];
            rhs[i] += w * basis[i] * o.y;
        }
    }
    if (!solve_linear(N, rhs, sol, 3)) return std::numeric_limits<double>::infinity();
    abc[0] = sol[0];
    abc[1] = sol[1];
    abc[2] = sol[2];
    double chi2 = 0.0;
    for (const auto& o : obs) {
        double x = scale_x(o.p, o.d, p_th, nu0);
        double f = abc[0] + abc[1] * x + abc[2] * x * x;
        double r = (o.y - f) / o.sigma;
        chi2 += r * r;
    }
    return chi2;
}

// Crossing of the p_l(p) polylines of two code distances, if any.
inline std::vector<double> crossings(const std::vector<Obs>& obs) {
    std::vector<int> ds;
    for (const auto& o : obs) ds.push_back(o.d);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    auto curve = [&](int d) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& o : obs)
            if (o.d == d) pts.push_back({o.p, o.y});
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    auto interp = [](const std::vector<std::pair<double, double>>& c, double p) {
        for (size_t i = 0; i + 1 < c.size(); ++i)
            if (p >= c[i].first && p <= c[i + 1].first) {
                double t = (p - c[i].first) / (c[i + 1].first - c[i].first);
                return c[i].second + t * (c[i + 1].second - c[i].second);
            }
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<double> out;
    for (size_t a = 0; a + 1 < ds.size(); ++a) {
        auto c1 = curve(ds[a]), c2 = curve(ds[a + 1]);
        double lo = std::max(c1.front().first, c2.front().first);
        double hi = std::min(c1.back().first, c2.back().first);
        if (!(lo < hi)) continue;
        const int grid = 200;
        double prev = interp(c1, lo) - interp(c2, lo);
        for (int k = 1; k <= grid; ++k) {
            double p = lo + (hi - lo) * k / grid;
            double cur = interp(c1, p) - interp(c2, p);
            if (std::isfinite(prev) && std::isfinite(cur) && prev * cur <= 0.0 &&
                (prev != 0.0 || cur != 0.0)) {
                double t = prev == cur ? 0.5 : prev / (prev - cur);
                out.push_back(p - (hi - lo) / grid * (1.0 - t));
                break;
            }
            prev = cur;
        }
    }
    return out;
}

}  // namespace fitdetail

struct FitOptions {
    int d_min = 0;             // drop points below this distance
    int bootstrap = 0;         // resample replicas for errors (0 = covariance only)
    uint64_t bootstrap_seed = 12345;
    double good_r2 = 0.999;
};

// Five-parameter weighted least squares (Levenberg-Marquardt with analytic
// Jacobian): quadratic scaling ansatz, (A,B,C) seeded by an inner linear
// solve, (p_th, nu0) seeded from curve crossings and 1.
inline FitResult fit_threshold(const std::vector<SweepPoint>& points,
                               const FitOptions& opt = {}) {
    std::vector<fitdetail::Obs> obs;
    for (const auto& pt : points) {
        if (pt.d < opt.d_min) continue;
        double sigma = pt.stderr_;
        if (sigma <= 0.0)  // zero-failure points still need a finite weight
            sigma = 1.0 / static_cast<double>(pt.shots);
        obs.push_back({pt.p, pt.p_l, sigma, pt.d});
    }
    std::vector<int> ds;
    for (const auto& o : obs) ds.push_back(o.d);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    if (ds.size() < 3)
        throw std::invalid_argument("fit_threshold: need at least 3 code distances");
    for (int d : ds) {
        int n = 0;
        for (const auto& o : obs) n += o.d == d;
        if (n < 4)
            throw std::invalid_argument("fit_threshold: need at least 4 p points per d");
    }

    // Initialization.
    auto cross = fitdetail::crossings(obs);
    double p_th;
    if (!cross.empty()) {
        std::sort(cross.begin(), cross.end());
        p_th = cross[cross.size() / 2];
    } else {
        std::vector<double> ps;
        for (const auto& o : obs) ps.push_back(o.p);
        std::sort(ps.begin(), ps.end());
        p_th = ps[ps.size() / 2];
    }
    double nu0 = 1.0;
    double abc[3];
    fitdetail::inner_fit(obs, p_th, nu0, abc);

    double theta[5] = {abc[0], abc[1], abc[2], p_th, nu0};
    const int n = static_cast<int>(obs.size());

    auto residuals = [&](const double* th, std::vector<double>& r,
                         std::vector<double>* J) {
        double chi2 = 0.0;
        r.resize(n);
        if (J) J->assign(n * 5, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto& o = obs[i];
            double s = std::pow(static_cast<double>(o.d), 1.0 / th[4]);
            double x = (o.p - th[3]) * s;
            double f = th[0] + th[1] * x + th[2] * x * x;
            double ri = (f - o.y) / o.sigma;
            r[i] = ri;
            chi2 += ri * ri;
            if (J) {
                double dfdx = th[1] + 2.0 * th[2] * x;
                double dsdnu = s * std::log(static_cast<double>(o.d)) *
                               (-1.0 / (th[4] * th[4]));
                (*J)[i * 5 + 0] = 1.0 / o.sigma;
                (*J)[i * 5 + 1] = x / o.sigma;
                (*J)[i * 5 + 2] = x * x / o.sigma;
                (*J)[i * 5 + 3] = -dfdx * s / o.sigma;
                (*J)[i * 5 + 4] = dfdx * (o.p - th[3]) * dsdnu / o.sigma;
            }
        }
        return chi2;
    };

    std::vector<double> r, J;
    double chi2 = residuals(theta, r, &J);
    double lambda = 1e-3;
    bool converged = false;
    for (int iter = 0; iter < 400; ++iter) {
        // Normal equations with LM damping.
        std::vector<double> H(25, 0.0), g(5, 0.0), step;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < 5; ++a) {
                for (int b = 0; b < 5; ++b) H[a * 5 + b] += J[i * 5 + a] * J[i * 5 + b];
                g[a] += J[i * 5 + a] * r[i];
            }
        std::vector<double> Hd = H;
        for (int a = 0; a < 5; ++a) Hd[a * 5 + a] *= 1.0 + lambda;
        if (!fitdetail::solve_linear(Hd, g, step, 5)) {
            lambda *= 10.0;
            continue;
        }
        double trial[5];
        for (int a = 0; a < 5; ++a) trial[a] = theta[a] - step[a];
        if (trial[4] <= 0.05) trial[4] = 0.05;  // keep the exponent sane
        std::vector<double> rt;
        double chi2t = residuals(trial, rt, nullptr);
        if (chi2t < chi2) {
            double rel = std::fabs(chi2 - chi2t) / std::max(chi2, 1e-30);
            for (int a = 0; a < 5; ++a) theta[a] = trial[a];
            chi2 = residuals(theta, r, &J);
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-14) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                converged = true;  // stuck at a (local) minimum
                break;
            }
        }
    }

    FitResult res;
    res.A = theta[0];
    res.B = theta[1];
    res.C = theta[2];
    res.p_th = theta[3];
    res.nu0 = theta[4];
    res.chi2 = chi2;
    res.points_used = n;
    res.dof = n - 5;
    res.converged = converged;

    // Parameter errors from the inverse of J^T J of the weighted residuals.
    residuals(theta, r, &J);
    std::vector<double> H(25, 0.0), cov;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) H[a * 5 + b] += J[i * 5 + a] * J[i * 5 + b];
    if (fitdetail::invert(H, cov, 5)) {
        res.A_err = std::sqrt(std::max(0.0, cov[0]));
        res.B_err = std::sqrt(std::max(0.0, cov[6]));
        res.C_err = std::sqrt(std::max(0.0, cov[12]));
        res.p_th_err = std::sqrt(std::max(0.0, cov[18]));
        res.nu0_err = std::sqrt(std::max(0.0, cov[24]));
    }

    // Weighted r^2 against the weighted-mean baseline.
    double sw = 0.0, swy = 0.0;
    for (const auto& o : obs) {
        double w = 1.0 / (o.sigma * o.sigma);
        sw += w;
        swy += w * o.y;
    }
    double ybar = swy / sw, ss_tot = 0.0;
    for (const auto& o : obs) {
        double w = 1.0 / (o.sigma * o.sigma);
        ss_tot += w * (o.y - ybar) * (o.y - ybar);
    }
    res.r2 = ss_tot > 0.0 ? 1.0 - chi2 / ss_tot : 0.0;
    res.good = res.converged && res.r2 >= opt.good_r2;

    if (opt.bootstrap > 0) {
        Rng rng(opt.bootstrap_seed);
        std::vector<double> pths, nus;
        std::vector<SweepPoint> used;
        for (const auto& pt : points)
            if (pt.d >= opt.d_min) used.push_back(pt);
        for (int b = 0; b < opt.bootstrap; ++b) {
            std::vector<SweepPoint> rep = used;
            for (auto& pt : rep) {
                long k = 0;  // binomial resample of the failure count
                for (long t = 0; t < pt.shots; ++t) k += rng.bernoulli(pt.p_l);
                pt.failures = k;
                pt.p_l = static_cast<double>(k) / pt.shots;
                pt.stderr_ = std::sqrt(std::max(pt.p_l * (1 - pt.p_l) / pt.shots,
                                                1.0 / (static_cast<double>(pt.shots) *
                                                       pt.shots)));
            }
            FitOptions inner = opt;
            inner.bootstrap = 0;
            try {
                FitResult fr = fit_threshold(rep, inner);
                pths.push_back(fr.p_th);
                nus.push_back(fr.nu0);
            } catch (const std::exception&) {
            }
        }
        auto sdev = [](const std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            double m = 0.0;
            for (double x : v) m += x;
            m /= v.size();
            double s = 0.0;
            for (double x : v) s += (x - m) * (x - m);
            return std::sqrt(s / (v.size() - 1));
        };
        if (pths.size() >= 2) {
            res.p_th_err = sdev(pths);
            res.nu0_err = sdev(nus);
        }
    }
    return res;
}

// Model prediction for plotting overlays.
inline double fit_eval(const FitResult& f, double p, int d) {
    double x = fitdetail::scale_x(p, d, f.p_th, f.nu0);
    return f.A + f.B * x + f.C * x * x;
}

}  // namespace surfsim
