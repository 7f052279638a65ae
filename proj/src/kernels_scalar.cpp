#include "polylab/kernels.hpp"

// Scalar reference kernels.  This translation unit is compiled with
// -ffp-contract=off so that the arithmetic matches the AVX2 variants
// operation for operation.

namespace polylab::kern {
namespace {

void axpy_scalar(double* dst, const double* src, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void correlate_scalar(double* out, const double* in, const double* taps,
                      std::size_t ntaps, std::size_t n_out) {
    for (std::size_t q = 0; q < ntaps; ++q) {
        const double a = taps[q];
        const double* s = in + q;
        for (std::size_t j = 0; j < n_out; ++j) out[j] += a * s[j];
    }
}

void apply_weights_scalar(double* out, const double* wbar, std::size_t n,
                          std::int64_t x0, std::uint64_t rowkey, double wplus,
                          double wminus) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t x = static_cast<std::uint64_t>(x0 + std::int64_t(i));
        const std::uint64_t h = mix64(rowkey ^ (kKeyCol * x));
        out[i] = wbar[i] * ((h >> 63) ? wminus : wplus);
    }
}

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = a[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = a[i] * b[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double sumsq_scalar(const double* a, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = a[i] * a[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double dot_sqsq_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ab = a[i] * b[i];
        double y = ab * ab - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double power_step_scalar(double* t, const double* v, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t[i] *= v[i];
        double y = t[i] - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

double max_scalar(const double* a, std::size_t n) {
    double m = n ? a[0] : 0.0;
    for (std::size_t i = 1; i < n; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{axpy_scalar,    correlate_scalar, apply_weights_scalar,
                         sum_scalar,     dot_scalar,       sumsq_scalar,
                         dot_sqsq_scalar, power_step_scalar, max_scalar,
                         "scalar"};
    return ops;
}

}  // namespace polylab::kern
