#include "punctsim/kernels.hpp"

#if defined(PUNCTSIM_HAVE_AVX2)

#include <immintrin.h>

#include <limits>

namespace punctsim::kernels {

int count_matches_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t len) {
    int c = 0;
    std::size_t i = 0;
    for (; i + 32 <= len; i += 32) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i eq = _mm256_cmpeq_epi8(va, vb);
        c += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(eq)));
    }
    for (; i < len; ++i) c += (a[i] == b[i]);
    return c;
}

// Four samples per iteration; the distance expression mirrors the scalar
// kernel exactly (sub, two muls, add; strict-less update), so results are
// bit-identical including tie handling.
void detect_batch_avx2(const double* re, const double* im, std::size_t n_samples,
                       const double* pr, const double* pi, std::size_t n_points,
                       std::uint16_t* out) {
    std::size_t s = 0;
    for (; s + 4 <= n_samples; s += 4) {
        __m256d vre = _mm256_loadu_pd(re + s);
        __m256d vim = _mm256_loadu_pd(im + s);
        __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        __m256d bidx = _mm256_setzero_pd();
        for (std::size_t p = 0; p < n_points; ++p) {
            __m256d dx = _mm256_sub_pd(vre, _mm256_set1_pd(pr[p]));
            __m256d dy = _mm256_sub_pd(vim, _mm256_set1_pd(pi[p]));
            __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            __m256d lt = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
            best = _mm256_blendv_pd(best, d, lt);
            bidx = _mm256_blendv_pd(bidx, _mm256_set1_pd(static_cast<double>(p)), lt);
        }
        alignas(32) double idx[4];
        _mm256_store_pd(idx, bidx);
        for (int k = 0; k < 4; ++k) out[s + k] = static_cast<std::uint16_t>(idx[k]);
    }
    if (s < n_samples)
        detect_batch_scalar(re + s, im + s, n_samples - s, pr, pi, n_points, out + s);
}

} // namespace punctsim::kernels

#endif // PUNCTSIM_HAVE_AVX2
