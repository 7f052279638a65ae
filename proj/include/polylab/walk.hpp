#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polylab/core.hpp"

namespace polylab::walk {

struct Step {
    int dx = 0;
    int dy = 0;
    double p = 0.0;
};

// Finite-support symmetric aperiodic random walk on Z^2 with covariance c*I.
class StepDistribution {
  public:
    // Validates: probabilities sum to 1 (1e-12), +/- symmetry, zero mean,
    // isotropic covariance c*I, irreducibility (generated subgroup = Z^2)
    // and aperiodicity (gcd of return times on a finite window is 1).
    explicit StepDistribution(std::vector<Step> steps);

    const std::vector<Step>& steps() const { return steps_; }
    double cov_scale() const { return cov_scale_; }
    int max_step_norm() const { return max_norm_; }  // max |dx|,|dy|
    int min_dx() const { return min_dx_; }
    int max_dx() const { return max_dx_; }
    int min_dy() const { return min_dy_; }
    int max_dy() const { return max_dy_; }

    // Characteristic function E[e^{i k.xi}] (real by symmetry).
    double char_fn(double k1, double k2) const;

  private:
    std::vector<Step> steps_;
    double cov_scale_ = 0.0;
    int max_norm_ = 0;
    int min_dx_ = 0, max_dx_ = 0, min_dy_ = 0, max_dy_ = 0;
};

// The calibrated walk with identity covariance:
// P(+-1,0)=P(0,+-1)=1/8, P(+-1,+-1)=1/16, P(+-2,0)=P(0,+-2)=1/16.
StepDistribution default_unit_covariance_walk();

// Small aperiodic walk (c = 1/4) used for tiny enumeration instances:
// P(0,0)=1/2, P(+-1,0)=P(0,+-1)=1/8.
StepDistribution lazy_quarter_walk();

// Load a walk from a JSON file {"steps": [{"dx":..,"dy":..,"p":..}, ...]},
// or resolve the names "default" / "lazy".
StepDistribution load_walk(const std::string& file_or_name);

struct KernelTableOptions {
    int dense_upto = 64;          // store every slice for n <= dense_upto
    std::set<int> checkpoints;    // extra slices to keep
    long returns_m_max = -1;      // q_m(0) horizon; default 2*n_max
    std::size_t mem_cap_bytes = std::size_t(3) << 30;
};

// Exact n-step transition kernels q_n(x) by convolution dynamic programming,
// plus return probabilities q_m(0).  Returns with m <= 2*n_max come from the
// DP slices (q_{n+n'}(0) = sum_x q_n(x) q_{n'}(x)); larger m are filled by
// quadrature of the characteristic function on a torus grid whose aliasing
// error is below 1e-16 relative.  Immutable after construction.
class KernelTable {
  public:
    KernelTable(StepDistribution walk, int n_max, KernelTableOptions opts = {});

    const StepDistribution& walk() const { return walk_; }
    int n_max() const { return n_max_; }
    long returns_m_max() const { return long(returns_.size()) - 1; }

    bool has_slice(int n) const { return slices_.count(n) != 0; }
    const Field2D& slice(int n) const;
    // q_m(0); throws DomainError when m exceeds the horizon.
    double return_prob(long m) const;

  private:
    StepDistribution walk_;
    int n_max_;
    std::map<int, Field2D> slices_;
    std::vector<double> returns_;
};

// One convolution step: out = step-law * in (exact support dilation).
Field2D convolve_step(const StepDistribution& walk, const Field2D& in);

// q_m(0) for m = 0..m_max via torus-grid quadrature of char_fn^m.
// Exact (to rounding) when the grid covers the full support; otherwise the
// aliasing error is < 1e-16 relative.
std::vector<double> spectral_returns(const StepDistribution& walk, long m_max);

// B[i] = sum_{s,s'} w_s w_{s'} q_{2i}(x_{s'} - x_s) for i = 1..i_max, where
// (x_s, w_s) are weighted lattice sites.  Same spectral route as above.
std::vector<double> pair_collision_moments(const StepDistribution& walk,
                                           const std::vector<PointI>& sites,
                                           const std::vector<double>& weights,
                                           int i_max);

// R_N = sum_{n=1..N} q_{2n}(0).
double collision_mass(const KernelTable& table, long N);

// Gaussian heat kernel p_{c t}(x) on R^2 (eq: 1/(2 pi c t) exp(-|x|^2/(2 c t))).
double heat_kernel(double t, Vec2 x, double cov_scale);

// sup_x |q_n(x) - p_{c n}(x)| over the slice support.
double llt_deviation(const KernelTable& table, int n);

}  // namespace polylab::walk
