#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "punctsim/similarity.hpp"

using namespace punctsim;

namespace {

// Brute-force region assignment: nearest low-order point per high-order point.
std::vector<int> brute_regions(const Constellation& low, const Constellation& high) {
    std::vector<int> out(high.order);
    for (int j = 0; j < high.order; ++j) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < low.order; ++i) {
            const double d = std::abs(high.points[j] - low.points[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        out[j] = best;
    }
    return out;
}

} // namespace

TEST_CASE("region partition across all order pairs") {
    for (int n : {2, 4, 16, 64}) {
        for (int m : {2, 4, 16, 64}) {
            const SimilarityMap map = build_similarity_map(n, m);
            const int q = std::min(n, m), h = std::max(n, m);
            REQUIRE(static_cast<int>(map.regions.size()) == q);
            int members = 0;
            for (const auto& r : map.regions) {
                CHECK(static_cast<int>(r.members.size()) == h / q);
                members += static_cast<int>(r.members.size());
            }
            CHECK(members == h);

            const auto brute = brute_regions(map.low(), map.high());
            for (int j = 0; j < h; ++j) CHECK(map.region_of_high[j] == brute[j]);
        }
    }
    CHECK_THROWS_AS(build_similarity_map(2, 8), std::invalid_argument);
}

TEST_CASE("(2,2): one URLLC and one eMBB symbol per region, absolute similarity") {
    const SimilarityMap map = build_similarity_map(2, 2);
    REQUIRE(map.regions.size() == 2);
    for (const auto& r : map.regions) {
        REQUIRE(r.members.size() == 1);
        CHECK(r.members[0] == r.region_symbol);
        CHECK(classify_pair(map, r.region_symbol, r.members[0], map.policy) ==
              Similarity::absolute);
        CHECK(r.enhanced == r.members);
    }
}

TEST_CASE("(2,16): region of URLLC 0 holds the eMBB labels 0000..0111") {
    const SimilarityMap map = build_similarity_map(2, 16);
    const auto& r0 = map.regions[0];
    REQUIRE(r0.members.size() == 8);
    for (int j : r0.members) CHECK(map.embb.labels[j][0] == '0');
}

TEST_CASE("(2,16): enhanced set is the far column {0000,0001,0011,0010}") {
    const SimilarityMap map = build_similarity_map(2, 16); // default eps=1e-2 @ 10 dB
    std::vector<std::string> enhanced;
    for (int j : map.regions[0].enhanced) enhanced.push_back(map.embb.labels[j]);
    std::sort(enhanced.begin(), enhanced.end());
    CHECK(enhanced == std::vector<std::string>{"0000", "0001", "0010", "0011"});
}

TEST_CASE("(2,16): inner-column symbol 0111 is weakly similar at eps=1e-3, 10 dB") {
    const SimilarityMap map = build_similarity_map(2, 16);
    int idx = -1;
    for (int j = 0; j < 16; ++j)
        if (map.embb.labels[j] == "0111") idx = j;
    REQUIRE(idx >= 0);
    EpsilonPolicy pol{1e-3, SnrPoint::from_db(10)};
    CHECK(classify_pair(map, 0, idx, pol) == Similarity::weak);

    // Independent check through the Gaussian tails of both error probabilities.
    const double gamma = 10.0;
    const double p_self = q_function(std::sqrt(2.0 * gamma) * 1.0);
    const double p_map = q_function(std::sqrt(2.0 * gamma) * map.embb.points[idx].real());
    CHECK(p_map - p_self > 1e-3);
}

TEST_CASE("classification errors") {
    const SimilarityMap map = build_similarity_map(2, 4);
    const int other_region_member = map.regions[1].members[0];
    CHECK_THROWS_AS(classify_pair(map, 0, other_region_member, map.policy),
                    std::invalid_argument);
}

TEST_CASE("enhanced set grows with epsilon") {
    std::size_t prev = 0;
    for (double eps : {1e-8, 1e-5, 1e-3, 1e-2, 0.1, 0.5}) {
        const SimilarityMap map =
            build_similarity_map(2, 16, EpsilonPolicy{eps, SnrPoint::from_db(10)});
        std::size_t total = 0;
        for (const auto& r : map.regions) total += r.enhanced.size();
        CHECK(total >= prev);
        prev = total;
        // Absolute-similar members are always included.
        for (const auto& r : map.regions)
            for (int j : r.members)
                if (classify_pair(map, r.region_symbol, j, map.policy) == Similarity::absolute)
                    CHECK(map.is_enhanced(r.region_symbol, j));
    }
}

TEST_CASE("eta identities under uniform priors") {
    CHECK(eta_uniform(build_similarity_map(2, 2)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eta_uniform(build_similarity_map(2, 4)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eta_uniform(build_similarity_map(2, 16)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eta_uniform(build_similarity_map(2, 64)) == doctest::Approx(0.5).epsilon(1e-12));

    // (4,4): exhaustive enumeration over all 16 symbol pairs.
    const SimilarityMap map = build_similarity_map(4, 4);
    int same = 0;
    for (int u = 0; u < 4; ++u)
        for (int e = 0; e < 4; ++e) same += (u == map.region_of_high[e] ? 1 : 0);
    CHECK(eta_uniform(map) == doctest::Approx(same / 16.0).epsilon(1e-12));
    CHECK(eta_uniform(map) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("eta validates priors") {
    const SimilarityMap map = build_similarity_map(2, 4);
    std::vector<double> pu{0.5, 0.5}, pe{0.25, 0.25, 0.25, 0.25};
    CHECK(eta(map, pu, pe) == doctest::Approx(0.5));
    std::vector<double> bad{0.6, 0.5};
    CHECK_THROWS_AS(eta(map, bad, pe), std::invalid_argument);
    std::vector<double> short_p{1.0};
    CHECK_THROWS_AS(eta(map, short_p, pe), std::invalid_argument);
}

TEST_CASE("eta with skewed priors follows the region masses") {
    const SimilarityMap map = build_similarity_map(2, 4);
    std::vector<double> pu{1.0, 0.0};          // always URLLC symbol 0
    std::vector<double> pe{0.7, 0.3, 0.0, 0.0}; // both in region 0
    CHECK(eta(map, pu, pe) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> pe2{0.0, 0.0, 0.5, 0.5};
    CHECK(eta(map, pu, pe2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("boundary distances match plane geometry") {
    const SimilarityMap b2 = build_similarity_map(2, 2);
    CHECK(boundary_distance(b2, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    const SimilarityMap b4 = build_similarity_map(2, 4);
    for (int j : b4.regions[0].members)
        CHECK(boundary_distance(b4, 0, j) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // (2,16): the BPSK boundary is the imaginary axis, so d = |Re|.
    const SimilarityMap b16 = build_similarity_map(2, 16);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 16; ++j)
            CHECK(boundary_distance(b16, i, j) ==
                  doctest::Approx(std::abs(b16.embb.points[j].real())).epsilon(1e-12));
    for (double d : b16.self_distances) CHECK(d == doctest::Approx(1.0));
}

TEST_CASE("dump is structured text with regions and distances") {
    const std::string text = dump(build_similarity_map(2, 4));
    CHECK(text.find("similarity-map n=2 m=4") != std::string::npos);
    CHECK(text.find("region 0") != std::string::npos);
    CHECK(text.find("enhanced") != std::string::npos);
    CHECK(text.find("distance-matrix") != std::string::npos);
}
