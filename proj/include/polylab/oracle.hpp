#pragma once

#include "polylab/disorder.hpp"
#include "polylab/test_function.hpp"
#include "polylab/walk.hpp"

namespace polylab::oracle {

// A configuration small enough for exhaustive enumeration over every
// disorder sign pattern: at most 20 space-time sites, i.e. 2^20 patterns.
struct TinyInstance {
    walk::StepDistribution walk;
    long N = 4;        // scaling constant used in the pairings
    int steps = 2;     // time horizon n
    Field2D phi0;      // initial field W_0 (phi_N values at lattice sites)
    fn::TestFunction psi = fn::TestFunction::constant(1.0);
    double sigma = 0.5;  // tanh(beta)
};

// Number of space-time disorder sites that carry weight (Wbar_k > 0).
int count_sites(const TinyInstance& inst);

struct ExactMoments {
    double EZ = 0.0;      // E Z_n(phi, psi)
    double EZ2 = 0.0;     // E Z_n^2
    double VarZ = 0.0;
    double EQV = 0.0;     // E <M>_n
    double EM2 = 0.0;     // E M_n^2
    double EZ0 = 0.0;     // initial pairing (deterministic)
};

// Exact moments by enumeration over all 2^{#sites} sign patterns.
// Throws ResourceError when the instance exceeds the 2^20 guard.
ExactMoments exact_moments(const TinyInstance& inst);

struct ConditionalCheck {
    double max_mean = 0.0;      // max over k, prefixes of |E[dM_k | F_k]|
    double max_var_gap = 0.0;   // max of |E[dM_k^2|F_k] - (sigma^2/N^2) sum Wbar^2 psi^2|
};

ConditionalCheck conditional_checks(const TinyInstance& inst);

}  // namespace polylab::oracle
