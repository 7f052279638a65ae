#include "polylab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace polylab::analytics {

namespace {

double simpson(const std::function<double(double)>& f, double a, double m, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double m, double b, double fa,
             double fm, double fb, double whole, double eps, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth) {
    if (a == b) return 0.0;
    // Rough scale from a coarse composite pass.
    const int n = 32;
    double scale = 0.0;
    for (int i = 0; i <= n; ++i) scale = std::max(scale, std::abs(f(a + (b - a) * i / n)));
    const double eps = std::max(rel_tol * scale * std::abs(b - a), 1e-300);
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adapt(f, a, m, b, fa, fm, fb, simpson(f, a, m, b, fa, fm, fb), eps, max_depth);
}

// ---------------------------------------------------------------------------
// Dickman-type density f_s and its Volterra continuation.

namespace {

constexpr double kMarchStep = 1.0 / 512.0;
constexpr double kSeriesCut = 0.125;  // series head on [0, 1/8]

// Marches I(x) = int_0^x f_s(a) / (1+a)^2 da for one fixed s.
struct FsMarcher {
    double s;
    double c;  // e^{-gamma s} / Gamma(s+1)
    std::vector<double> fa;    // f_s at nodes a_j = 1/8 + j h  (also > 1)
    std::vector<double> icum;  // I(a_j)
    double head = 0.0;         // I(1/8)

    explicit FsMarcher(double s_in) : s(s_in) {
        c = std::exp(-kEulerGamma * s - std::lgamma(s + 1.0));
        head = series_head(kSeriesCut);
    }

    // int_0^x a^{s-1}/(1+a)^2 da * s * c via the binomial series (x <= 1/8).
    double series_head(double x) const {
        double sum = 0.0, xs = std::pow(x, s);
        double xj = 1.0;
        for (int j = 0; j <= 64; ++j) {
            const double term = (j % 2 ? -1.0 : 1.0) * double(j + 1) * xs * xj / (s + j);
            sum += term;
            xj *= x;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return c * s * sum;
    }

    double closed(double a) const { return s * std::pow(a, s - 1.0) * c; }

    double f_value(std::size_t j) {
        const double a = kSeriesCut + double(j) * kMarchStep;
        if (a <= 1.0) return closed(a);
        // a - 1 = node j - 512 + ... : 1 - 1/8 = 448 h and 1 = 512 h.
        return s * std::pow(a, s - 1.0) * (c - icum[j - 512]);
    }

    void extend_to(double x) {
        const std::size_t need =
            x <= kSeriesCut ? 0 : std::size_t(std::ceil((x - kSeriesCut) / kMarchStep)) + 1;
        while (fa.size() < need + 1) {
            const std::size_t j = fa.size();
            if (j == 0) {
                fa.push_back(closed(kSeriesCut));
                icum.push_back(head);
                continue;
            }
            fa.push_back(f_value(j));
            const double aj = kSeriesCut + double(j) * kMarchStep;
            const double gj = fa[j] / ((1.0 + aj) * (1.0 + aj));
            const double ap = aj - kMarchStep;
            const double gp = fa[j - 1] / ((1.0 + ap) * (1.0 + ap));
            icum.push_back(icum[j - 1] + 0.5 * kMarchStep * (gp + gj));
        }
    }

    double integral_to(double x) {
        if (x <= 0.0) return 0.0;
        if (x <= kSeriesCut) return series_head(x);
        extend_to(x);
        const std::size_t j = std::size_t((x - kSeriesCut) / kMarchStep);
        const double aj = kSeriesCut + double(j) * kMarchStep;
        double fx;
        if (x <= 1.0) {
            fx = closed(x);
        } else {
            // interpolate f on the marched grid (second order, matching the
            // trapezoid error of the march itself)
            const double a1 = aj + kMarchStep;
            extend_to(a1 + kMarchStep);
            const double w = (x - aj) / kMarchStep;
            fx = (1.0 - w) * fa[j] + w * fa[j + 1];
        }
        const double gx = fx / ((1.0 + x) * (1.0 + x));
        const double gj = fa[j] / ((1.0 + aj) * (1.0 + aj));
        return icum[j] + 0.5 * (x - aj) * (gj + gx);
    }
};

}  // namespace

double f_s(double s, double t) {
    if (!(s > 0.0)) throw DomainError("f_s: s must be positive");
    if (!(t > 0.0)) throw DomainError("f_s: t must be positive");
    const double c = std::exp(-kEulerGamma * s - std::lgamma(s + 1.0));
    const double lead = s * std::pow(t, s - 1.0) * c;
    if (t <= 1.0) return lead;
    FsMarcher m(s);
    return lead - s * std::pow(t, s - 1.0) * m.integral_to(t - 1.0);
}

namespace {

// Magnitude envelope of the G_theta integrand, used to truncate the s-range.
double g_integrand_envelope(double theta, double t, double s) {
    return std::exp(std::log(s) + (s - 1.0) * std::log(t) + (theta - kEulerGamma) * s -
                    std::lgamma(s + 1.0));
}

}  // namespace

double G_theta(double theta, double t) {
    if (!(t > 0.0)) throw DomainError("G_theta: t must be positive");
    // Find the s-truncation: envelope below 1e-18 of its peak.
    double peak = 0.0;
    for (double s = 0.0625; s <= 64.0; s *= 2.0)
        peak = std::max(peak, g_integrand_envelope(theta, t, s));
    double s_hi = 4.0;
    while (s_hi < 4096.0 && g_integrand_envelope(theta, t, s_hi) > 1e-18 * peak) s_hi *= 2.0;

    if (t <= 1.0) {
        auto f = [&](double s) {
            return s <= 0.0 ? 0.0
                            : std::exp(std::log(s) + (s - 1.0) * std::log(t) +
                                       (theta - kEulerGamma) * s - std::lgamma(s + 1.0));
        };
        return integrate(f, 0.0, s_hi, 1e-12);
    }
    auto f = [&](double s) { return s <= 0.0 ? 0.0 : std::exp(theta * s) * f_s(s, t); };
    return integrate(f, 0.0, s_hi, 1e-10);
}

double G_theta_spatial(double theta, double t, Vec2 x) {
    if (!(t > 0.0)) throw DomainError("G_theta_spatial: t must be positive");
    const double pt = std::exp(-(x.x * x.x + x.y * x.y) / t) / (kPi * t);  // p_{t/2}(x)
    return G_theta(theta, t) * pt;
}

double GhatEnvelope::operator()(double t) const {
    const double l = std::log(std::exp(2.0) * T / t);
    return c / (t * l * l);
}

GhatEnvelope fit_ghat(double theta, double T, int grid_points) {
    GhatEnvelope env;
    env.theta = theta;
    env.T = T;
    double c = 0.0;
    const double lo = std::log(1e-6), hi = std::log(T);
    for (int i = 0; i <= grid_points; ++i) {
        const double t = std::exp(lo + (hi - lo) * i / grid_points);
        const double l = std::log(std::exp(2.0) * T / t);
        c = std::max(c, G_theta(theta, t) * t * l * l);
    }
    env.c = c;
    return env;
}

// ---------------------------------------------------------------------------
// First moment / variance oracles.

namespace {

double heat_density(double var, Vec2 d) {
    return std::exp(-(d.x * d.x + d.y * d.y) / (2.0 * var)) / (2.0 * kPi * var);
}

double mass_of(const fn::TestFunction& f) {
    using K = fn::TestFunction::Kind;
    switch (f.kind()) {
        case K::Gaussian:
        case K::Bump:
            return 1.0;
        case K::Indicator: {
            auto s = f.support();
            const double r = 0.5 * (s[1] - s[0]);
            return kPi * r * r;
        }
        case K::Constant: {
            auto s = f.support();  // throws if unwindowed
            return f.constant_value() * (s[1] - s[0]) * (s[3] - s[2]);
        }
        default:
            throw DomainError("mass: unsupported test function kind");
    }
}

// p_var * f at u, closed form when available.  Constant means a genuinely
// unbounded constant (valid for psi; a windowed constant phi is handled by
// the compact numeric route instead).
bool heat_conv_closed(const fn::TestFunction& f, double var, Vec2 u, double& out) {
    using K = fn::TestFunction::Kind;
    if (f.kind() == K::Constant) {
        out = f.constant_value();
        return true;
    }
    if (f.kind() == K::Gaussian) {
        const Vec2 c = f.center();
        out = heat_density(var + f.param(), {u.x - c.x, u.y - c.y});
        return true;
    }
    return false;
}

double integrate2d(const std::function<double(Vec2)>& f, std::array<double, 4> box,
                   double rel_tol) {
    auto outer = [&](double x) {
        return integrate([&](double y) { return f({x, y}); }, box[2], box[3], rel_tol);
    };
    return integrate(outer, box[0], box[1], rel_tol);
}

}  // namespace

double first_moment_oracle(const fn::TestFunction& phi, const fn::TestFunction& psi, double t) {
    if (t < 0.0) throw DomainError("first_moment_oracle: t must be >= 0");
    using K = fn::TestFunction::Kind;
    if (psi.is_constant()) return psi.constant_value() * mass_of(phi);

    if (phi.kind() == K::Gaussian && psi.kind() == K::Gaussian) {
        const Vec2 c1 = phi.center(), c2 = psi.center();
        return heat_density(phi.param() + psi.param() + t, {c1.x - c2.x, c1.y - c2.y});
    }
    if (t == 0.0) {
        auto f = [&](Vec2 x) { return phi.eval(x) * psi.eval(x); };
        return integrate2d(f, phi.support(), 1e-9);
    }
    double probe;
    if (heat_conv_closed(psi, t, {0, 0}, probe)) {
        // integrate over phi's support against the psi-side convolution
        auto f = [&](Vec2 x) {
            double v;
            heat_conv_closed(psi, t, x, v);
            return phi.eval(x) * v;
        };
        return integrate2d(f, phi.support(), 1e-9);
    }
    if (phi.kind() == K::Gaussian) {
        auto f = [&](Vec2 y) {
            double v;
            heat_conv_closed(phi, t, y, v);
            return psi.eval(y) * v;
        };
        return integrate2d(f, psi.support(), 1e-9);
    }
    // both sides compact: inner heat pairing per outer point
    auto inner = [&](Vec2 y) {
        auto g = [&](Vec2 x) { return phi.eval(x) * heat_density(t, {y.x - x.x, y.y - x.y}); };
        return integrate2d(g, phi.support(), 1e-7);
    };
    auto f = [&](Vec2 y) { return psi.eval(y) * inner(y); };
    return integrate2d(f, psi.support(), 1e-6);
}

namespace {

// Cumulative H(tau) = int_0^tau G_theta(w) dw on a log grid, with the small-w
// head 1/log(1/w) + theta/log^2(1/w) taken from the leading asymptotics.
struct GCumulative {
    double theta = 0.0;
    double t = 0.0;
    double wmin = 1e-8;
    std::vector<double> logw;
    std::vector<double> cum;

    GCumulative(double th, double t_in, int grid) : theta(th), t(t_in) {
        const int n = std::max(64, grid);
        logw.resize(std::size_t(n) + 1);
        cum.resize(std::size_t(n) + 1);
        const double lo = std::log(wmin), hi = std::log(t);
        double prev_g = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double lw = lo + (hi - lo) * i / n;
            const double w = std::exp(lw);
            const double g = G_theta(theta, w) * w;  // d w = w d(log w)
            logw[std::size_t(i)] = lw;
            cum[std::size_t(i)] =
                i == 0 ? head(w) : cum[std::size_t(i) - 1] +
                                       0.5 * (hi - lo) / n * (prev_g + g);
            prev_g = g;
        }
    }

    double head(double w) const {
        const double l = std::log(1.0 / w);
        return 1.0 / l + theta / (l * l);
    }

    double operator()(double tau) const {
        if (tau <= 0.0) return 0.0;
        const double lw = std::log(tau);
        if (lw <= logw.front()) return head(tau);
        if (lw >= logw.back()) return cum.back();
        const auto it = std::upper_bound(logw.begin(), logw.end(), lw);
        const std::size_t i = std::size_t(it - logw.begin());
        const double w0 = logw[i - 1], w1 = logw[i];
        const double f = (lw - w0) / (w1 - w0);
        return (1.0 - f) * cum[i - 1] + f * cum[i];
    }
};

// Radial Fourier transform table for a bump phi (Hankel of order zero).
struct RadialFourier {
    double radius = 1.0;
    std::vector<double> k;
    std::vector<double> hat;

    explicit RadialFourier(double r) : radius(r) {
        const int nk = 1024;
        const double kmax = 80.0 / r;
        k.resize(nk + 1);
        hat.resize(nk + 1);
        for (int i = 0; i <= nk; ++i) {
            const double kk = kmax * i / nk;
            k[std::size_t(i)] = kk;
            auto f = [&](double rr) {
                const double rho2 = rr * rr / (r * r);
                const double prof =
                    rho2 < 1.0 ? std::exp(-1.0 / (1.0 - rho2)) / (r * r * fn::bump_unit_mass())
                               : 0.0;
                return 2.0 * kPi * prof * std::cyl_bessel_j(0.0, kk * rr) * rr;
            };
            hat[std::size_t(i)] = integrate(f, 0.0, r, 1e-10);
        }
    }

    // E(u) = (1/2pi) int |phi_hat|^2 e^{-u k^2} k dk  (trapezoid on the table)
    double energy(double u) const {
        double s = 0.0;
        for (std::size_t i = 1; i < k.size(); ++i) {
            const double f0 = hat[i - 1] * hat[i - 1] * std::exp(-u * k[i - 1] * k[i - 1]) * k[i - 1];
            const double f1 = hat[i] * hat[i] * std::exp(-u * k[i] * k[i]) * k[i];
            s += 0.5 * (k[i] - k[i - 1]) * (f0 + f1);
        }
        return s / (2.0 * kPi);
    }
};

}  // namespace

double variance_oracle(const fn::TestFunction& phi, double t, double theta,
                       VarianceOracleOptions opts) {
    if (!(t >= 0.0)) throw DomainError("variance_oracle: t must be >= 0");
    if (t == 0.0) return 0.0;
    using K = fn::TestFunction::Kind;
    GCumulative H(theta, t, opts.w_grid);
    if (phi.kind() == K::Gaussian) {
        const double a = phi.param();
        auto f = [&](double u) { return H(t - u) / (a + u); };
        return integrate(f, 0.0, t, 1e-9);
    }
    if (phi.kind() == K::Bump) {
        RadialFourier rf(phi.param());
        auto f = [&](double u) { return 4.0 * kPi * rf.energy(u) * H(t - u); };
        return integrate(f, 0.0, t, 1e-8);
    }
    throw DomainError("variance_oracle: phi must be gaussian or bump");
}

// ---------------------------------------------------------------------------
// Iterated kernels phi_1^{(k)} on a log-u grid.

namespace {

struct PhiGrids {
    static constexpr double kWlo = -131.0;
    static constexpr double kWhi = 15.0;
    static constexpr double kDw = 0.05;
    static constexpr int kMaxK = 8;

    std::vector<std::vector<double>> grids;  // grids[k] for k >= 1
    std::mutex mu;

    static std::size_t npts() { return std::size_t((kWhi - kWlo) / kDw) + 1; }

    static double closed_k1(double u) {
        return 2.0 * std::log((1.0 + std::sqrt(1.0 + u)) / std::sqrt(u));
    }

    double eval_grid(const std::vector<double>& g, double w) const {
        if (w >= kWhi) {
            // u^{-1/2} tail
            return g.back() * std::exp(-(w - kWhi) / 2.0);
        }
        if (w <= kWlo) {
            const double slope = (g[1] - g[0]) / kDw;
            return g[0] + slope * (w - kWlo);
        }
        const double x = (w - kWlo) / kDw;
        const std::size_t i = std::min(std::size_t(x), npts() - 2);
        const double f = x - double(i);
        // local cubic (falls back to linear at the edges)
        if (i == 0 || i + 2 >= npts())
            return (1.0 - f) * g[i] + f * g[i + 1];
        const double ym1 = g[i - 1], y0 = g[i], y1 = g[i + 1], y2 = g[i + 2];
        const double a0 = y0;
        const double a1 = 0.5 * (y1 - ym1);
        const double a2 = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
        const double a3 = 0.5 * (y2 - ym1) + 1.5 * (y0 - y1);
        return ((a3 * f + a2) * f + a1) * f + a0;
    }

    const std::vector<double>& get(int k) {
        std::lock_guard<std::mutex> lock(mu);
        if (grids.empty()) grids.resize(kMaxK + 1);
        if (k < 1 || k > kMaxK) throw DomainError("phi_iterated: k out of supported range (<= 8)");
        if (!grids[std::size_t(k)].empty()) return grids[std::size_t(k)];
        for (int kk = 1; kk <= k; ++kk) {
            if (!grids[std::size_t(kk)].empty()) continue;
            std::vector<double> g(npts());
            if (kk == 1) {
                for (std::size_t i = 0; i < npts(); ++i)
                    g[i] = closed_k1(std::exp(kWlo + double(i) * kDw));
            } else {
                const auto& prev = grids[std::size_t(kk - 1)];
                for (std::size_t i = 0; i < npts(); ++i) {
                    const double u = std::exp(kWlo + double(i) * kDw);
                    const double tau_min = std::min(std::log(u), 0.0) - 40.0;
                    auto f = [&](double tau) {
                        const double s = std::exp(tau);
                        return std::exp(0.5 * tau) * eval_grid(prev, tau) /
                               std::sqrt(s + u);
                    };
                    g[i] = integrate(f, tau_min, 0.0, 1e-11);
                }
            }
            grids[std::size_t(kk)] = std::move(g);
        }
        return grids[std::size_t(k)];
    }
};

PhiGrids& phi_grids() {
    static PhiGrids g;
    return g;
}

}  // namespace

double phi_iterated(int k, double t, double u) {
    if (k < 0) throw DomainError("phi_iterated: k must be >= 0");
    if (k == 0) return 1.0;
    if (!(t > 0.0) || !(u > 0.0)) throw DomainError("phi_iterated: t and u must be positive");
    auto& pg = phi_grids();
    const auto& g = pg.get(k);
    return pg.eval_grid(g, std::log(u / t));
}

double phi_iterated_direct(int k, double t, double u) {
    if (k < 0) throw DomainError("phi_iterated_direct: k must be >= 0");
    if (k == 0) return 1.0;
    if (k > 3) throw DomainError("phi_iterated_direct: k <= 3 only");
    if (!(t > 0.0) || !(u > 0.0)) throw DomainError("phi_iterated_direct: t, u must be positive");
    auto rec = [&](auto&& self, int kk, double uu) -> double {
        if (kk == 0) return 1.0;
        const double tau_min = std::min(std::log(uu), std::log(t)) - 40.0;
        auto f = [&](double tau) {
            const double s = std::exp(tau);
            return std::exp(0.5 * tau) * self(self, kk - 1, s) / std::sqrt(s + uu);
        };
        return integrate(f, tau_min, std::log(t), 1e-10);
    };
    return rec(rec, k, u);
}

std::vector<std::pair<double, double>> mollifier_log_limit(const fn::TestFunction& psi, Vec2 x,
                                                           double t,
                                                           const std::vector<double>& eps_sweep) {
    if (!(t > 0.0)) throw DomainError("mollifier_log_limit: t must be positive");
    std::vector<std::pair<double, double>> out;
    for (double eps : eps_sweep) {
        if (!(eps > 0.0)) throw DomainError("mollifier_log_limit: eps must be positive");
        auto conv = [&](double var) {
            double v;
            if (heat_conv_closed(psi, var, x, v)) return v;
            auto f = [&](Vec2 z) {
                return psi.eval(z) * heat_density(var, {z.x - x.x, z.y - x.y});
            };
            return integrate2d(f, psi.support(), 1e-9);
        };
        auto f = [&](double s) { return conv(0.5 * (s + eps)) / (s + eps); };
        const double val = integrate(f, 0.0, t, 1e-10) / (-std::log(eps));
        out.push_back({eps, val});
    }
    return out;
}

double qv_renorm_heat_oracle(double a, double t, double eps) {
    if (!(a > 0.0) || !(t > 0.0) || !(eps > 0.0) || !(eps < 1.0))
        throw DomainError("qv_renorm_heat_oracle: bad arguments");
    return std::log((a + t + eps) / (a + eps)) / (-std::log(eps));
}

}  // namespace polylab::analytics
