#include <atomic>
#include <cstdlib>
#include <string_view>

#include "conefpp/errors.hpp"
#include "conefpp/kernels.hpp"

namespace conefpp::kernels {

namespace {

Isa detect() {
    Isa best = isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    if (const char* env = std::getenv("CONEFPP_SIMD")) {
        const std::string_view v(env);
        if (v == "scalar") return Isa::Scalar;
        if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    }
    return best;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "?";
}

bool isa_available(Isa isa) {
    if (isa == Isa::Scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    CONEFPP_REQUIRE(isa_available(isa), "force_isa: instruction set not available");
    current().store(isa, std::memory_order_relaxed);
}

void uniforms(std::uint64_t seed, std::uint64_t stream, std::span<const std::uint64_t> lo,
              std::span<const std::uint64_t> hi, std::span<double> out) {
    CONEFPP_REQUIRE(lo.size() == out.size() && hi.size() == out.size(),
                    "uniforms: span sizes differ");
    const std::uint64_t prefix = stream_prefix(seed, stream);
    if (active_isa() == Isa::Avx2)
        avx2::uniforms(prefix, lo.data(), hi.data(), out.data(), out.size());
    else
        scalar::uniforms(prefix, lo.data(), hi.data(), out.data(), out.size());
}

void column_min(std::span<const double> data, std::size_t rows, std::span<double> out) {
    CONEFPP_REQUIRE(rows >= 1 && data.size() == rows * out.size(),
                    "column_min: data is not rows x out.size()");
    if (active_isa() == Isa::Avx2)
        avx2::column_min(data.data(), rows, out.data(), out.size());
    else
        scalar::column_min(data.data(), rows, out.data(), out.size());
}

}  // namespace conefpp::kernels
