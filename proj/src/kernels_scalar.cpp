#include "punctsim/kernels.hpp"

#include <limits>

namespace punctsim::kernels {

int count_matches_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t len) {
    int c = 0;
    for (std::size_t i = 0; i < len; ++i) c += (a[i] == b[i]);
    return c;
}

void detect_batch_scalar(const double* re, const double* im, std::size_t n_samples,
                         const double* pr, const double* pi, std::size_t n_points,
                         std::uint16_t* out) {
    for (std::size_t s = 0; s < n_samples; ++s) {
        double best = std::numeric_limits<double>::infinity();
        std::uint16_t idx = 0;
        for (std::size_t p = 0; p < n_points; ++p) {
            const double dx = re[s] - pr[p];
            const double dy = im[s] - pi[p];
            const double d = dx * dx + dy * dy;
            if (d < best) {
                best = d;
                idx = static_cast<std::uint16_t>(p);
            }
        }
        out[s] = idx;
    }
}

} // namespace punctsim::kernels
