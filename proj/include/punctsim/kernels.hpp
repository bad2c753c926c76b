#pragma once

// Hot inner loops of the search and the Monte Carlo receiver, as scalar
// reference kernels plus AVX2 variants selected at runtime. The SIMD paths
// are bit-identical to the scalar ones (same operation order, no FMA), so
// equivalence tests assert exact equality.

#include <complex>
#include <cstddef>
#include <cstdint>

namespace punctsim::kernels {

/// Number of positions where a[i] == b[i].
int count_matches(const std::uint8_t* a, const std::uint8_t* b, std::size_t len);

/// Nearest-point index (lowest index wins ties) per sample.
/// re/im are the sample coordinates; pr/pi the constellation coordinates.
void detect_batch(const double* re, const double* im, std::size_t n_samples,
                  const double* pr, const double* pi, std::size_t n_points,
                  std::uint16_t* out);

// Scalar reference implementations (always available; oracle for the SIMD paths).
int count_matches_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t len);
void detect_batch_scalar(const double* re, const double* im, std::size_t n_samples,
                         const double* pr, const double* pi, std::size_t n_points,
                         std::uint16_t* out);

#if defined(PUNCTSIM_HAVE_AVX2)
int count_matches_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t len);
void detect_batch_avx2(const double* re, const double* im, std::size_t n_samples,
                       const double* pr, const double* pi, std::size_t n_points,
                       std::uint16_t* out);
#endif

/// Backend chosen at runtime ("avx2" or "scalar"). Set PUNCTSIM_FORCE_SCALAR=1
/// to pin the scalar path.
const char* active_backend();

} // namespace punctsim::kernels
