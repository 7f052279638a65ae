#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "polylab/polymer.hpp"

namespace polylab::semimart {

using polymer::PolymerField;

// Delta_N psi(x) = N ( sum_y q_1(x,y) psi_N(y) - psi_N(x) ), evaluated in
// difference form sum_s q(s) (psi_N(x+s) - psi_N(x)) so that constants give
// an exact zero.
double discrete_laplacian(const walk::StepDistribution& w,
                          const std::function<double(Vec2)>& psi, long N, PointI x);
double discrete_laplacian(const walk::StepDistribution& w, const fn::TestFunction& psi,
                          long N, PointI x);

// Exact discrete semimartingale decomposition of Z_{N;k/N}(phi,psi):
//   Z_{(k+1)/N} - Z_{k/N} = drift_k + dM_k,
//   drift_k = (1/N) Z_{k/N}(phi, Delta_N psi),
//   dM_k    = (1/N) sum_y Wbar_{k+1}(y) psi_N(y) (e_{k+1,y} - 1),
//   qv_k    = (sigma^2/N^2) sum_{j<=k} sum_y Wbar_j(y)^2 psi_N(y)^2.
struct DecompositionTrace {
    long N = 0;
    long steps = 0;
    std::vector<double> Z;      // steps+1 entries
    std::vector<double> drift;  // steps entries
    std::vector<double> dM;     // steps entries
    std::vector<double> qv;     // steps+1 entries, qv[0] = 0
    std::uint64_t stream = 0;   // disorder stream identity

    double martingale(long k) const;  // M_k = sum_{j<k} dM_j
};

struct MultiTrace {
    std::vector<DecompositionTrace> traces;
    // cross[i][j] (i < j): running cross variation series, steps+1 entries.
    std::vector<std::vector<std::vector<double>>> cross;
};

DecompositionTrace decompose(const walk::StepDistribution& w, const fn::TestFunction& phi,
                             const fn::TestFunction& psi, long N, double t,
                             const disorder::CriticalCoupling& coupling,
                             const disorder::DisorderSpec& spec, double trunc_rel = 1e-40);

// One disorder path, several pairings; fills pairwise cross variations.
MultiTrace decompose_multi(const walk::StepDistribution& w, const fn::TestFunction& phi,
                           const std::vector<fn::TestFunction>& psis, long N, double t,
                           const disorder::CriticalCoupling& coupling,
                           const disorder::DisorderSpec& spec, double trunc_rel = 1e-40);

const std::vector<double>& qv_process(const DecompositionTrace& trace);

void require_same_stream(const DecompositionTrace& a, const DecompositionTrace& b);

// Cross variation series of traces i and j from the same evolution.
const std::vector<double>& cross_qv(const MultiTrace& mt, std::size_t i, std::size_t j);

struct MollifierSpec {
    enum class Kind { Heat, Bump } kind = Kind::Heat;
    double bump_radius = 1.0;
};

// (1/N) sum_y W(y) m_eps(y/sqrt(N) - z), m_eps = p_eps or eps^{-1} f(./sqrt(eps)).
double mollified_density(const PolymerField& field, double eps, Vec2 z,
                         const MollifierSpec& mollifier = {});

struct GridSpec {
    double spacing = -1.0;   // default sqrt(eps)/4; must be <= sqrt(eps)/4
    double dilation = -1.0;  // default 5 sqrt(eps)
};

struct QvScanResult {
    double qv_exact = 0.0;                // <M>_{floor(Nt)}
    std::vector<double> eps;              // scanned epsilons
    std::vector<double> qv_renorm;        // matching entries
};

// Single evolution; for each eps accumulates the log-renormalized
// quadratic-variation estimator
//   (4 pi / -log eps) * sum_{k < floor(Nt)} h^2/N * sum_z rho_k(z)^2 psi(z)^2
// over a lattice-aligned z-grid covering the support box dilated by 5
// sqrt(eps).  Requires eps >= 16/N so the grid resolves the mollifier.
QvScanResult qv_scan(const walk::StepDistribution& w, const fn::TestFunction& phi, long N,
                     double t, const disorder::CriticalCoupling& coupling,
                     const disorder::DisorderSpec& spec, const std::vector<double>& eps_list,
                     const fn::TestFunction& psi, const GridSpec& grid = {},
                     double trunc_rel = 1e-40);

double qv_renormalized(const walk::StepDistribution& w, const fn::TestFunction& phi, long N,
                       double t, const disorder::CriticalCoupling& coupling,
                       const disorder::DisorderSpec& spec, double eps,
                       const fn::TestFunction& psi, const GridSpec& grid = {},
                       double trunc_rel = 1e-40);

struct PeakCell {
    double lambda = 0.0;
    double eps = 0.0;
    double occupation = 0.0;     // integral of the density over the peak set
    double area = 0.0;           // space-time measure of the peak set
    double band_area = 0.0;      // measure of {1/lambda <= rho/log(1/eps) < lambda}
    double logscaled_sup = 0.0;  // sup rho / (1 + log(1/eps))
};

struct PeakParams {
    fn::TestFunction f = fn::TestFunction::bump({0, 0}, 1.0);
    std::vector<double> lambdas;
    std::vector<double> epsilons;
    std::array<double, 4> region{-2, 2, -2, 2};  // xmin, xmax, ymin, ymax
    double s = 0.0;
    double t = 0.5;
};

std::vector<PeakCell> peak_measure(const walk::StepDistribution& w,
                                   const fn::TestFunction& phi, long N,
                                   const disorder::CriticalCoupling& coupling,
                                   const disorder::DisorderSpec& spec,
                                   const PeakParams& params, double trunc_rel = 1e-40);

}  // namespace polylab::semimart
