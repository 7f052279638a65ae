#pragma once

#include <functional>
#include <vector>

#include "polylab/core.hpp"
#include "polylab/test_function.hpp"

namespace polylab::analytics {

// Dickman-type density:
//   f_s(t) = s t^{s-1} e^{-gamma s} / Gamma(s+1)                    t in (0,1]
//   f_s(t) = same - s t^{s-1} int_0^{t-1} f_s(a)/(1+a)^2 da          t > 1
// The continuation integral is marched on a uniform grid (step 1/512) with a
// series head that resolves the a^{s-1} endpoint.
double f_s(double s, double t);

// G_theta(t) = int_0^inf e^{theta s} f_s(t) ds, adaptive quadrature with the
// tail truncated below 1e-12 relative.
double G_theta(double theta, double t);

// G_theta(t, x) = G_theta(t) p_{t/2}(x).
double G_theta_spatial(double theta, double t, Vec2 x);

// Envelope G_hat_{theta,T}(t) = c / (t log^2(e^2 T / t)); `fit_c` scans a log
// grid of t in (0, T] for the smallest admissible constant.
struct GhatEnvelope {
    double theta = 0.0;
    double T = 1.0;
    double c = 0.0;
    double operator()(double t) const;
};
GhatEnvelope fit_ghat(double theta, double T, int grid_points = 512);

// int int phi(x) p_t(y - x) psi(y) dx dy  (t = 0 degenerates to int phi psi).
double first_moment_oracle(const fn::TestFunction& phi, const fn::TestFunction& psi, double t);

struct VarianceOracleOptions {
    int w_grid = 2048;    // log-grid points for int_0 G
    double s_tol = 1e-12; // relative tolerance of the s-quadrature in G
};

// Continuum variance of Z_t^{theta,phi}(1):
//   Var = 4 pi int_0^t du E(u) int_0^{t-u} G_theta(w) dw,
// E(u) = int Phi_u^2 = 1/(4 pi (a+u)) for phi = gaussian(variance a); bump
// phi is reduced numerically through its radial Fourier transform.
double variance_oracle(const fn::TestFunction& phi, double t, double theta,
                       VarianceOracleOptions opts = {});

// Iterated kernels phi_t^{(k)}:
//   phi_t^{(0)} = 1,  phi_t^{(k)}(u) = int_0^t phi_t^{(k-1)}(s) / sqrt(s(s+u)) ds.
// The recursion gives phi_t^{(k)}(u) = phi_1^{(k)}(u/t); values are served
// from cached log-grid tabulations of phi_1^{(k)}.
double phi_iterated(int k, double t, double u);

// Direct recursive evaluation (independent of the cached grids); k <= 3.
double phi_iterated_direct(int k, double t, double u);

// (-1/log eps) int dz int_0^t ds (s+eps)^{-1} p_{(s+eps)/2}(z - x) psi(z),
// evaluated for each eps in the sweep.
std::vector<std::pair<double, double>> mollifier_log_limit(const fn::TestFunction& psi,
                                                           Vec2 x, double t,
                                                           const std::vector<double>& eps_sweep);

// beta = 0 closed form of the renormalized QV estimator's limit for
// phi = gaussian(variance a), psi = 1:
//   (4 pi / -log eps) int_0^t int p_{a+s+eps}(z)^2 dz ds
//     = log((a+t+eps)/(a+eps)) / (-log eps).
double qv_renorm_heat_oracle(double a, double t, double eps);

// Adaptive Simpson quadrature (exposed for tests and small oracles).
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth = 40);

}  // namespace polylab::analytics
