#include "polylab/kernels.hpp"

// AVX2 kernels.  Compiled with -mavx2 and -ffp-contract=off; uses mul+add
// (no FMA) so map-like kernels are bit-identical to the scalar reference.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace polylab::kern {
namespace {

inline __m256i mullo64(__m256i a, __m256i b) {
    // 64-bit low product from 32x32 partials (AVX2 has no vpmullq).
    __m256i a_hi = _mm256_srli_epi64(a, 32);
    __m256i b_hi = _mm256_srli_epi64(b, 32);
    __m256i lolo = _mm256_mul_epu32(a, b);
    __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a, b_hi),
                                     _mm256_mul_epu32(a_hi, b));
    return _mm256_add_epi64(lolo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64_v(__m256i z) {
    const __m256i c1 = _mm256_set1_epi64x(0xBF58476D1CE4E5B9LL);
    const __m256i c2 = _mm256_set1_epi64x(0x94D049BB133111EBLL);
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mullo64(z, c1);
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mullo64(z, c2);
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

void axpy_avx2(double* dst, const double* src, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        d = _mm256_add_pd(d, _mm256_mul_pd(av, s));
        _mm256_storeu_pd(dst + i, d);
    }
    for (; i < n; ++i) dst[i] += a * src[i];
}

void correlate_avx2(double* out, const double* in, const double* taps,
                    std::size_t ntaps, std::size_t n_out) {
    for (std::size_t q = 0; q < ntaps; ++q) {
        axpy_avx2(out, in + q, taps[q], n_out);
    }
}

void apply_weights_avx2(double* out, const double* wbar, std::size_t n,
                        std::int64_t x0, std::uint64_t rowkey, double wplus,
                        double wminus) {
    const __m256i keycol = _mm256_set1_epi64x(std::int64_t(kKeyCol));
    const __m256i rk = _mm256_set1_epi64x(std::int64_t(rowkey));
    const __m256d wp = _mm256_set1_pd(wplus);
    const __m256d wm = _mm256_set1_pd(wminus);
    __m256i x = _mm256_add_epi64(_mm256_set1_epi64x(x0),
                                 _mm256_setr_epi64x(0, 1, 2, 3));
    const __m256i four = _mm256_set1_epi64x(4);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i h = mix64_v(_mm256_xor_si256(rk, mullo64(keycol, x)));
        // blendv_pd keys off the sign bit, i.e. the hash's top bit.
        __m256d sel = _mm256_blendv_pd(wp, wm, _mm256_castsi256_pd(h));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(wbar + i), sel));
        x = _mm256_add_epi64(x, four);
    }
    for (; i < n; ++i) {
        const std::uint64_t xi = static_cast<std::uint64_t>(x0 + std::int64_t(i));
        const std::uint64_t h = mix64(rowkey ^ (kKeyCol * xi));
        out[i] = wbar[i] * ((h >> 63) ? wminus : wplus);
    }
}

// 4-lane Kahan accumulator.
struct Kahan4 {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();

    inline void add(__m256d x) {
        __m256d y = _mm256_sub_pd(x, c);
        __m256d t = _mm256_add_pd(s, y);
        c = _mm256_sub_pd(_mm256_sub_pd(t, s), y);
        s = t;
    }
    // Merge lanes and continue with a scalar Kahan state.
    void finish(double& sum, double& comp) const {
        alignas(32) double ls[4];
        _mm256_storeu_pd(ls, s);
        for (double lane : ls) {
            double y = lane - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
};

double sum_avx2(const double* a, std::size_t n) {
    Kahan4 k;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) k.add(_mm256_loadu_pd(a + i));
    double s = 0.0, c = 0.0;
    k.finish(s, c);
    for (; i < n; ++i) {
        double y = a[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    Kahan4 k;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        k.add(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = 0.0, c = 0.0;
    k.finish(s, c);
    for (; i < n; ++i) {
        double y = a[i] * b[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double sumsq_avx2(const double* a, std::size_t n) {
    Kahan4 k;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(a + i);
        k.add(_mm256_mul_pd(x, x));
    }
    double s = 0.0, c = 0.0;
    k.finish(s, c);
    for (; i < n; ++i) {
        double y = a[i] * a[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double dot_sqsq_avx2(const double* a, const double* b, std::size_t n) {
    Kahan4 k;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        k.add(_mm256_mul_pd(ab, ab));
    }
    double s = 0.0, c = 0.0;
    k.finish(s, c);
    for (; i < n; ++i) {
        double ab = a[i] * b[i];
        double y = ab * ab - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double power_step_avx2(double* t, const double* v, std::size_t n) {
    Kahan4 k;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_mul_pd(_mm256_loadu_pd(t + i), _mm256_loadu_pd(v + i));
        _mm256_storeu_pd(t + i, x);
        k.add(x);
    }
    double s = 0.0, c = 0.0;
    k.finish(s, c);
    for (; i < n; ++i) {
        t[i] *= v[i];
        double y = t[i] - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

double max_avx2(const double* a, std::size_t n) {
    if (n == 0) return 0.0;
    std::size_t i = 0;
    double m = a[0];
    if (n >= 4) {
        __m256d mv = _mm256_loadu_pd(a);
        for (i = 4; i + 4 <= n; i += 4)
            mv = _mm256_max_pd(mv, _mm256_loadu_pd(a + i));
        alignas(32) double lanes[4];
        _mm256_storeu_pd(lanes, mv);
        m = lanes[0];
        for (int l = 1; l < 4; ++l)
            if (lanes[l] > m) m = lanes[l];
    }
    for (; i < n; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

const Ops kAvx2Ops{axpy_avx2,    correlate_avx2, apply_weights_avx2,
                   sum_avx2,     dot_avx2,       sumsq_avx2,
                   dot_sqsq_avx2, power_step_avx2, max_avx2,
                   "avx2"};

}  // namespace

const Ops* avx2_ops() {
    return __builtin_cpu_supports("avx2") ? &kAvx2Ops : nullptr;
}

}  // namespace polylab::kern

#else

namespace polylab::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace polylab::kern

#endif
