#include "conefpp/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define CONEFPP_X86 1
#else
#define CONEFPP_X86 0
#endif

namespace conefpp::kernels::avx2 {

#if CONEFPP_X86

namespace {

// Low 64 bits of a 64x64 product; AVX2 only has 32x32->64 multiplies.
__attribute__((target("avx2"))) inline __m256i mullo64(__m256i a, __m256i b) {
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i lo_lo = _mm256_mul_epu32(a, b);
    const __m256i cross =
        _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
    return _mm256_add_epi64(lo_lo, _mm256_slli_epi64(cross, 32));
}

__attribute__((target("avx2"))) inline __m256i fmix64(__m256i x) {
    const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(kMix1));
    const __m256i m2 = _mm256_set1_epi64x(static_cast<long long>(kMix2));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 30));
    x = mullo64(x, m1);
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 27));
    x = mullo64(x, m2);
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
    return x;
}

}  // namespace

__attribute__((target("avx2"))) void uniforms(std::uint64_t prefix, const std::uint64_t* lo,
                                              const std::uint64_t* hi, double* out,
                                              std::size_t n) {
    const __m256i p = _mm256_set1_epi64x(static_cast<long long>(prefix));
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lo + i));
        const __m256i h = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hi + i));
        __m256i x = fmix64(_mm256_xor_si256(p, l));
        x = fmix64(_mm256_xor_si256(x, h));
        const __m256i bits = _mm256_or_si256(_mm256_srli_epi64(x, 12), one_bits);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_castsi256_pd(bits), one));
    }
    scalar::uniforms(prefix, lo + i, hi + i, out + i, n - i);
}

__attribute__((target("avx2"))) void column_min(const double* data, std::size_t rows,
                                                double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d m = _mm256_loadu_pd(data + i);
        for (std::size_t r = 1; r < rows; ++r) m = _mm256_min_pd(_mm256_loadu_pd(data + r * n + i), m);
        _mm256_storeu_pd(out + i, m);
    }
    for (; i < n; ++i) {
        double m = data[i];
        for (std::size_t r = 1; r < rows; ++r) {
            const double v = data[r * n + i];
            m = v < m ? v : m;
        }
        out[i] = m;
    }
}

#else

void uniforms(std::uint64_t prefix, const std::uint64_t* lo, const std::uint64_t* hi,
              double* out, std::size_t n) {
    scalar::uniforms(prefix, lo, hi, out, n);
}
void column_min(const double* data, std::size_t rows, double* out, std::size_t n) {
    scalar::column_min(data, rows, out, n);
}

#endif

}  // namespace conefpp::kernels::avx2
