#include <doctest.h>

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "punctsim/constellation.hpp"
#include "punctsim/kernels.hpp"
#include "punctsim/rng.hpp"

using namespace punctsim;

namespace {

// Exhaustive nearest-point scan, written independently of the kernels.
int reference_detect(const std::vector<cd>& pts, cd s) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::norm(s - pts[i]);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace

TEST_CASE("count_matches: scalar reference vs dispatched backend") {
    RngStream rng(11, 0);
    for (int len : {0, 1, 7, 24, 31, 32, 33, 96, 200, 1024}) {
        std::vector<std::uint8_t> a(len), b(len);
        for (int i = 0; i < len; ++i) {
            a[i] = static_cast<std::uint8_t>(rng.next_below(4));
            b[i] = static_cast<std::uint8_t>(rng.next_below(4));
        }
        if (len > 4) b[len / 2] = 0xFF; // sentinel (never matches small ids)
        const int ref = kernels::count_matches_scalar(a.data(), b.data(), len);
        CHECK(kernels::count_matches(a.data(), b.data(), len) == ref);
#if defined(__AVX2__) || defined(PUNCTSIM_HAVE_AVX2)
        if (std::string(kernels::active_backend()) == "avx2")
            CHECK(kernels::count_matches_avx2(a.data(), b.data(), len) == ref);
#endif
    }
}

TEST_CASE("detect_batch: bit-identical to the scalar kernel and to brute force") {
    RngStream rng(12, 0);
    for (int order : {2, 4, 16, 64}) {
        const Constellation c = build_constellation(order);
        const int n = order == 16 ? 100001 : 4097; // dense oracle sweep on 16-QAM
        std::vector<cd> samples(n);
        for (int i = 0; i < n; ++i)
            samples[i] = cd{3.0 * (rng.next_double() - 0.5), 3.0 * (rng.next_double() - 0.5)};
        // A few exact points and boundary samples to exercise tie handling.
        samples[0] = c.points[order / 2];
        samples[1] = cd{0.0, 0.0};
        samples[2] = cd{0.0, 1.0};

        std::vector<double> re(n), im(n), pr(order), pi(order);
        for (int i = 0; i < n; ++i) {
            re[i] = samples[i].real();
            im[i] = samples[i].imag();
        }
        for (int p = 0; p < order; ++p) {
            pr[p] = c.points[p].real();
            pi[p] = c.points[p].imag();
        }
        std::vector<std::uint16_t> got(n), ref(n);
        kernels::detect_batch(re.data(), im.data(), n, pr.data(), pi.data(), order, got.data());
        kernels::detect_batch_scalar(re.data(), im.data(), n, pr.data(), pi.data(), order,
                                     ref.data());
        for (int i = 0; i < n; ++i) {
            REQUIRE(got[i] == ref[i]);
            REQUIRE(got[i] == reference_detect(c.points, samples[i]));
        }
    }
}

TEST_CASE("backend reports a known name") {
    const std::string b = kernels::active_backend();
    CHECK((b == "avx2" || b == "scalar"));
}
