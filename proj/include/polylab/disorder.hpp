#pragma once

#include <cstdint>

#include "polylab/core.hpp"
#include "polylab/kernels.hpp"

namespace polylab::disorder {

// Cumulant generating function of the +-1 Bernoulli disorder: log E[e^{b w}].
double lambda_of_beta(double beta);

// Calibration record for the critical disorder window:
//   sigma2 = e^{lambda(2 b) - 2 lambda(b)} - 1 = (1/R_N)(1 + theta/log N).
struct CriticalCoupling {
    long N = 0;
    double theta = 0.0;
    double R_N = 0.0;
    double sigma2 = 0.0;  // tanh(beta_N)^2
    double beta_N = 0.0;

    double sigma() const { return std::sqrt(sigma2); }
    // Weight values e^{+-beta - lambda(beta)} = 1 +- tanh(beta).
    double weight_plus() const { return 1.0 + std::tanh(beta_N); }
    double weight_minus() const { return 1.0 - std::tanh(beta_N); }

    // Zero-disorder limit (beta = 0, weights identically 1).
    static CriticalCoupling zero_disorder(long N);
};

// Solve for beta_N in closed form (artanh of the target root).
// Throws CalibrationError unless the target sigma^2 lies in (0,1).
CriticalCoupling calibrate(long N, double theta, double R_N);

// Deterministic counter-based disorder stream.
struct DisorderSpec {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    double beta = 0.0;
};

// Keyed hash chain: every weight is a pure function of (seed, replica, n, x).
inline std::uint64_t stream_base(std::uint64_t seed, std::uint32_t replica) {
    return kern::mix64(seed ^ (kern::kKeyReplica * std::uint64_t(replica)));
}
inline std::uint64_t row_key(std::uint64_t base, long n, long y) {
    const std::uint64_t hn = kern::mix64(base ^ (kern::kKeyTime * std::uint64_t(n)));
    return kern::mix64(hn ^ (kern::kKeyRow * std::uint64_t(y)));
}
inline bool sign_bit(std::uint64_t rowkey, long x) {
    return kern::mix64(rowkey ^ (kern::kKeyCol * std::uint64_t(x))) >> 63;
}

// e_{n,x} = e^{beta w - lambda(beta)} with w = +-1 drawn from the hash.
double weight_at(const DisorderSpec& spec, long n, long x, long y);

// xi_{n,x} = e_{n,x} - 1 = +- tanh(beta).
double xi_at(const DisorderSpec& spec, long n, long x, long y);

}  // namespace polylab::disorder
