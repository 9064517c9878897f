#pragma once

// Data-parallel inner loops of the environment generator: counter-based
// uniform variates and element-wise minima. Each kernel has a scalar
// reference and an AVX2 variant that must agree bit for bit; the variant is
// picked once at runtime from the CPU features (override with the
// CONEFPP_SIMD environment variable: "scalar" or "avx2").

#include <cstdint>
#include <cstring>
#include <span>

namespace conefpp::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Test hook: pin the dispatch target. Throws if the ISA is unavailable.
void force_isa(Isa isa);

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ull;
inline constexpr std::uint64_t kMix2 = 0x94D049BB133111EBull;

inline std::uint64_t fmix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= kMix1;
    x ^= x >> 27;
    x *= kMix2;
    x ^= x >> 31;
    return x;
}

// Per-(seed, stream) prefix shared by every lane of a batch.
inline std::uint64_t stream_prefix(std::uint64_t seed, std::uint64_t stream) {
    return fmix64(seed + kGolden * (stream + 1));
}

inline std::uint64_t mix_key(std::uint64_t prefix, std::uint64_t lo, std::uint64_t hi) {
    return fmix64(fmix64(prefix ^ lo) ^ hi);
}

// 52 high-quality bits mapped to [0, 1) through the exponent trick, which
// the vector path reproduces exactly.
inline double to_unit(std::uint64_t h) {
    const std::uint64_t bits = (h >> 12) | 0x3FF0000000000000ull;
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d - 1.0;
}

inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t lo,
                      std::uint64_t hi) {
    return to_unit(mix_key(stream_prefix(seed, stream), lo, hi));
}

// out[i] = uniform(seed, stream, lo[i], hi[i])
void uniforms(std::uint64_t seed, std::uint64_t stream, std::span<const std::uint64_t> lo,
              std::span<const std::uint64_t> hi, std::span<double> out);

// `data` holds `rows` consecutive rows of out.size() values;
// out[i] = min over r of data[r * out.size() + i].
void column_min(std::span<const double> data, std::size_t rows, std::span<double> out);

namespace scalar {
void uniforms(std::uint64_t prefix, const std::uint64_t* lo, const std::uint64_t* hi,
              double* out, std::size_t n);
void column_min(const double* data, std::size_t rows, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
void uniforms(std::uint64_t prefix, const std::uint64_t* lo, const std::uint64_t* hi,
              double* out, std::size_t n);
void column_min(const double* data, std::size_t rows, double* out, std::size_t n);
}  // namespace avx2

}  // namespace conefpp::kernels
