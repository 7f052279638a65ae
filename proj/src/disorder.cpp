#include "polylab/disorder.hpp"

#include <cmath>

namespace polylab::disorder {

double lambda_of_beta(double beta) {
    if (beta < 0.0) throw DomainError("lambda_of_beta: beta must be >= 0");
    // log cosh(b), stable for large b.
    const double b = std::abs(beta);
    return b + std::log1p(std::exp(-2.0 * b)) - std::numbers::ln2_v<double>;
}

CriticalCoupling CriticalCoupling::zero_disorder(long N) {
    CriticalCoupling c;
    c.N = N;
    c.theta = 0.0;
    c.R_N = 0.0;
    c.sigma2 = 0.0;
    c.beta_N = 0.0;
    return c;
}

CriticalCoupling calibrate(long N, double theta, double R_N) {
    if (N < 2) throw CalibrationError("calibrate: N must be >= 2");
    if (!(R_N > 0.0)) throw CalibrationError("calibrate: R_N must be positive");
    const double target = (1.0 + theta / std::log(double(N))) / R_N;
    if (!(target > 0.0))
        throw CalibrationError("calibrate: target sigma^2 <= 0 (theta too negative for this N)");
    if (!(target < 1.0)) throw CalibrationError("calibrate: target sigma^2 >= 1");
    CriticalCoupling c;
    c.N = N;
    c.theta = theta;
    c.R_N = R_N;
    c.sigma2 = target;
    c.beta_N = std::atanh(std::sqrt(target));
    return c;
}

double weight_at(const DisorderSpec& spec, long n, long x, long y) {
    const double sb = std::tanh(spec.beta);
    const std::uint64_t base = stream_base(spec.seed, spec.replica);
    return sign_bit(row_key(base, n, y), x) ? 1.0 - sb : 1.0 + sb;
}

double xi_at(const DisorderSpec& spec, long n, long x, long y) {
    const double sb = std::tanh(spec.beta);
    const std::uint64_t base = stream_base(spec.seed, spec.replica);
    return sign_bit(row_key(base, n, y), x) ? -sb : sb;
}

}  // namespace polylab::disorder
