#pragma once

#include <functional>
#include <vector>

#include "polylab/disorder.hpp"
#include "polylab/test_function.hpp"
#include "polylab/walk.hpp"

namespace polylab::renewal {

struct RenewalOptions {
    int n_spatial = 0;  // build U_N(n, x) for n <= n_spatial (0 = totals only)
    std::size_t mem_cap_bytes = std::size_t(2) << 30;
};

// Weighted local renewal function U_N by exact dynamic programming:
//   U(0) = sigma^2,  U(n) = sigma^2 sum_{m=0}^{n-1} U(m) q_{2(n-m)}(0).
// Spatial slices satisfy U(n,x) = sigma^2 sum_{m<n} sum_z U(m,z) q_{n-m}(x-z)^2
// and are stored as even-even quarter grids (requires an axis-symmetric walk).
class RenewalTable {
  public:
    RenewalTable(const disorder::CriticalCoupling& coupling, const walk::KernelTable& kernel,
                 int n_max, RenewalOptions opts = {});

    double sigma2() const { return sigma2_; }
    long N() const { return N_; }
    double theta() const { return theta_; }
    int n_max() const { return int(totals_.size()) - 1; }
    int n_spatial() const { return n_spatial_; }

    double total(int n) const;
    // sum_{u=0}^{m} U(u)
    double prefix(int m) const;
    // U_N(n, x); zero outside the reachable box.
    double spatial(int n, int x, int y) const;
    // sum_x U_N(n, x) recomputed from the spatial slice.
    double spatial_sum(int n) const;

  private:
    double sigma2_ = 0.0;
    long N_ = 0;
    double theta_ = 0.0;
    std::vector<double> totals_;
    std::vector<double> prefix_;
    int n_spatial_ = 0;
    int radius_ = 0;  // quarter-grid radius
    std::vector<std::vector<double>> spatial_;  // (radius+1)^2 quarter grids
};

RenewalTable build_totals(const disorder::CriticalCoupling& coupling,
                          const walk::KernelTable& kernel, int n_max,
                          RenewalOptions opts = {});

// max over n/N in [0.1, 1] of |U_N(n) / ((sigma^2 log N / N) G_theta(n/N)) - 1|.
double compare_to_G(const RenewalTable& table, long N,
                    const std::function<double(double)>& G_theta);

// sum_{u=1}^{NT} e^{-lambda u / N} U(u).
double laplace_sum(const RenewalTable& table, double lambda, long N, double T);

// Exact variance of Z_{N;t}(phi, psi) for constant psi:
//   Var = c^2 / N^2 * sum_{i=1}^{K} B(i) * prefix(K - i),  K = floor(N t),
// where B(i) pairs phi's lattice weights through q_{2i}.
// Throws DomainError for non-constant psi (use Monte Carlo instead).
double discrete_variance_mass(const fn::TestFunction& phi, long N, double t,
                              const RenewalTable& table, const walk::StepDistribution& walk,
                              const fn::TestFunction& psi = fn::TestFunction::constant(1.0));

}  // namespace polylab::renewal
