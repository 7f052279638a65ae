#pragma once

#include <cmath>
#include <cstddef>

namespace polylab::stats {

// One-pass accumulation of mean and central moments up to order four
// (Welford / Pebay updates).
struct Moments {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const double n1 = double(n);
        n += 1;
        const double delta = x - mean;
        const double dn = delta / double(n);
        const double dn2 = dn * dn;
        const double t1 = delta * dn * n1;
        mean += dn;
        m4 += t1 * dn2 * (double(n) * double(n) - 3.0 * double(n) + 3.0) + 6.0 * dn2 * m2 -
              4.0 * dn * m3;
        m3 += t1 * dn * (double(n) - 2.0) - 3.0 * dn * m2;
        m2 += t1;
    }

    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double se_mean() const { return n > 0 ? std::sqrt(variance() / double(n)) : 0.0; }
    double central4() const { return n > 0 ? m4 / double(n) : 0.0; }
    // Standard error of the sample variance.
    double se_variance() const {
        if (n < 2) return 0.0;
        const double s2 = variance();
        const double v = (central4() - s2 * s2 * double(n - 3) / double(n - 1)) / double(n);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }
};

// Least-squares slope of y against x.
inline double regression_slope(const double* x, const double* y, std::size_t n) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = double(n) * sxx - sx * sx;
    return (double(n) * sxy - sx * sy) / d;
}

}  // namespace polylab::stats
