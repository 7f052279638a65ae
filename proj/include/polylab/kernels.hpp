#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Low-level array kernels used by the hot loops (transfer-matrix convolution,
// disorder weighting, field reductions, Gaussian blur passes, spectral power
// iteration).  Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2 variant selected at runtime.  Map-like kernels (axpy,
// correlate, apply_weights) are bit-exact across backends; reductions use
// compensated summation and agree to a few ulps.

namespace polylab::kern {

// SplitMix64 finalizer; the canonical bit-mixing step of the counter-based
// disorder hash.  Must be identical in all backends.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kKeyReplica = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kKeyTime = 0x8CB92BA72F3D8DD7ULL;
inline constexpr std::uint64_t kKeyRow = 0xACD5AD43274593B9ULL;
inline constexpr std::uint64_t kKeyCol = 0xD6E8FEB86659FD93ULL;

struct Ops {
    // dst[i] += a * src[i]
    void (*axpy)(double* dst, const double* src, double a, std::size_t n);
    // out[j] += sum_q taps[q] * in[j + q],  j = 0..n_out-1
    void (*correlate)(double* out, const double* in, const double* taps,
                      std::size_t ntaps, std::size_t n_out);
    // out[i] = wbar[i] * (sign(rowkey, x0 + i) ? wminus : wplus)
    // where sign(k, x) = top bit of mix64(k ^ (kKeyCol * x)).
    void (*apply_weights)(double* out, const double* wbar, std::size_t n,
                          std::int64_t x0, std::uint64_t rowkey, double wplus,
                          double wminus);
    // Kahan-compensated reductions.
    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sumsq)(const double* a, std::size_t n);          // sum a^2
    double (*dot_sqsq)(const double* a, const double* b, std::size_t n);  // sum a^2 b^2
    // t[i] *= v[i]; returns sum_i t[i] (compensated).
    double (*power_step)(double* t, const double* v, std::size_t n);
    double (*max)(const double* a, std::size_t n);

    const char* name;
};

// Active backend (chosen once: POLYLAB_SIMD env var = scalar|avx2|auto).
const Ops& active();
// Force a backend by name ("scalar", "avx2"); returns false if unavailable.
bool select(const std::string& name);
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported

}  // namespace polylab::kern
