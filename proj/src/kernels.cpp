#include "punctsim/kernels.hpp"

#include <cstdlib>

namespace punctsim::kernels {

namespace {

bool use_avx2() {
#if defined(PUNCTSIM_HAVE_AVX2)
    static const bool enabled = [] {
        const char* force = std::getenv("PUNCTSIM_FORCE_SCALAR");
        if (force && force[0] == '1') return false;
        return static_cast<bool>(__builtin_cpu_supports("avx2"));
    }();
    return enabled;
#else
    return false;
#endif
}

} // namespace

const char* active_backend() { return use_avx2() ? "avx2" : "scalar"; }

int count_matches(const std::uint8_t* a, const std::uint8_t* b, std::size_t len) {
#if defined(PUNCTSIM_HAVE_AVX2)
    if (use_avx2()) return count_matches_avx2(a, b, len);
#endif
    return count_matches_scalar(a, b, len);
}

void detect_batch(const double* re, const double* im, std::size_t n_samples, const double* pr,
                  const double* pi, std::size_t n_points, std::uint16_t* out) {
#if defined(PUNCTSIM_HAVE_AVX2)
    if (use_avx2()) {
        detect_batch_avx2(re, im, n_samples, pr, pi, n_points, out);
        return;
    }
#endif
    detect_batch_scalar(re, im, n_samples, pr, pi, n_points, out);
}

} // namespace punctsim::kernels
