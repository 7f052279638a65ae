#pragma once

#include <utility>
#include <vector>

#include "polylab/core.hpp"
#include "polylab/disorder.hpp"
#include "polylab/test_function.hpp"
#include "polylab/walk.hpp"

namespace polylab::polymer {

// One time-slice of the weighted partition-function field:
//   Wbar_n(y) = sum_z W_{n-1}(z) q_1(z,y)   (pre-weight field)
//   W_n(y)    = e_{n,y} * Wbar_n(y)         (fully weighted field)
// Entries are not normalized by 1/N; pairings apply the 1/N at read time.
struct PolymerField {
    walk::StepDistribution walk;
    disorder::CriticalCoupling coupling;
    disorder::DisorderSpec spec;
    long N = 0;
    long n = 0;  // time index
    Field2D W;
    Field2D Wbar;
    // Entries below trunc_rel * max(Wbar) are dropped from the active box
    // after each convolution (0 disables; default keeps 40 digits of range).
    double trunc_rel = 1e-40;
    std::uint64_t stream = 0;  // hash base; identifies the disorder stream
};

// Lattice support of phi at scale sqrt(N): sites y with phi(y/sqrt(N)) != 0
// restricted to phi's window, as a dense field.  Throws EmptySupportError
// when no lattice point survives, DomainError when phi takes negative values.
Field2D lattice_initial(const fn::TestFunction& phi, long N);

PolymerField init_field(const fn::TestFunction& phi, long N,
                        const walk::StepDistribution& walk,
                        const disorder::CriticalCoupling& coupling,
                        const disorder::DisorderSpec& spec, double trunc_rel = 1e-40);

// Advance one transfer-matrix step (convolve, then weight).  Raises
// OverflowError when any entry would exceed 1e300.
void step(PolymerField& field);

// Z_{N; n/N}(phi, psi) = (1/N) sum_y W_n(y) psi(y/sqrt(N)).
double pair(const PolymerField& field, const fn::TestFunction& psi);

// Same pairing against the pre-weight field Wbar.
double pair_bar(const PolymerField& field, const fn::TestFunction& psi);

// (1/N) sum_y f(y)^2 psi_N(y)^2 over a field slice; used by the quadratic
// variation accumulators.
double pair_sq(const Field2D& f, long N, const fn::TestFunction& psi);

// Atomic-measure export: one (y/sqrt(N), W_n(y)/N) entry per box site.
std::vector<std::pair<Vec2, double>> density_snapshot(const PolymerField& field);

// Weighted sum (1/N) sum_y f(y) psi(y/sqrt(N)) for an arbitrary slice.
double weighted_pairing(const Field2D& f, long N, const fn::TestFunction& psi);

}  // namespace polylab::polymer
