#include "conefpp/kernels.hpp"

namespace conefpp::kernels::scalar {

void uniforms(std::uint64_t prefix, const std::uint64_t* lo, const std::uint64_t* hi,
              double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = to_unit(mix_key(prefix, lo[i], hi[i]));
}

void column_min(const double* data, std::size_t rows, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double m = data[i];
        for (std::size_t r = 1; r < rows; ++r) {
            const double v = data[r * n + i];
            // same operand order as _mm256_min_pd(v, m)
            m = v < m ? v : m;
        }
        out[i] = m;
    }
}

}  // namespace conefpp::kernels::scalar
