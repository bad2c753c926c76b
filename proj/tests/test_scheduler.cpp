#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "punctsim/analytic.hpp"
#include "punctsim/rng.hpp"
#include "punctsim/scheduler.hpp"

using namespace punctsim;

namespace {

std::vector<std::uint8_t> random_regions(RngStream& rng, int len, int alphabet) {
    std::vector<std::uint8_t> v(len);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng.next_below(alphabet));
    return v;
}

// Independent re-count of the argmax over candidates.
int oracle_argmax(const std::vector<std::uint8_t>& u, const std::vector<std::uint8_t>& cand,
                  int K) {
    const int zeta = static_cast<int>(u.size());
    int best = -1, best_k = 0;
    for (int k = 0; k < K; ++k) {
        int c = 0;
        for (int i = 0; i < zeta; ++i) c += (cand[std::size_t(k) * zeta + i] == u[i]);
        if (c > best) {
            best = c;
            best_k = k;
        }
    }
    return best_k;
}

} // namespace

TEST_CASE("similarity_search selects the perfect match and counts work exactly") {
    RngStream rng(20, 0);
    const int zeta = 24, K = 40;
    auto u = random_regions(rng, zeta, 2);
    auto cand = random_regions(rng, K * zeta, 2);
    std::copy(u.begin(), u.end(), cand.begin() + 17 * zeta); // plant a perfect match
    const SearchResult r = similarity_search(u, cand, K);
    CHECK(r.selected == 17);
    CHECK(r.count == zeta);
    CHECK(r.comparisons == std::int64_t(K) * zeta);
}

TEST_CASE("K = 1 selects the sole candidate whatever the count") {
    RngStream rng(21, 0);
    auto u = random_regions(rng, 24, 2);
    auto cand = random_regions(rng, 24, 2);
    const SearchResult r = similarity_search(u, cand, 1);
    CHECK(r.selected == 0);
    CHECK(r.comparisons == 24);
}

TEST_CASE("argmax ties break toward the lowest candidate index") {
    std::vector<std::uint8_t> u{0, 0, 0, 0};
    std::vector<std::uint8_t> cand{1, 0, 0, 0,   // c = 3
                                   0, 0, 0, 1,   // c = 3 (tie)
                                   1, 1, 0, 0};  // c = 2
    const SearchResult r = similarity_search(u, cand, 3);
    CHECK(r.selected == 0);
    CHECK(r.count == 3);
}

TEST_CASE("similarity_search rejects malformed inputs") {
    std::vector<std::uint8_t> u{0, 1};
    std::vector<std::uint8_t> cand{0, 1, 1, 0};
    CHECK_THROWS_AS(similarity_search(u, cand, 0), std::invalid_argument);
    CHECK_THROWS_AS(similarity_search(u, cand, 3), std::invalid_argument);
}

TEST_CASE("argmax equals an independent re-count on random instances") {
    RngStream rng(22, 0);
    for (int t = 0; t < 300; ++t) {
        const int zeta = 4 + static_cast<int>(rng.next_below(28));
        const int K = 1 + static_cast<int>(rng.next_below(50));
        auto u = random_regions(rng, zeta, 2);
        auto cand = random_regions(rng, K * zeta, 2);
        const SearchResult r = similarity_search(u, cand, K);
        CHECK(r.selected == oracle_argmax(u, cand, K));
    }
}

TEST_CASE("expected best count is non-decreasing in K") {
    RngStream rng(23, 0);
    const int zeta = 24;
    double prev = -1.0;
    for (int K : {1, 4, 16, 64}) {
        double acc = 0.0;
        for (int t = 0; t < 1000; ++t) {
            auto u = random_regions(rng, zeta, 2);
            auto cand = random_regions(rng, K * zeta, 2);
            acc += similarity_search(u, cand, K).count;
        }
        const double mean = acc / 1000;
        CHECK(mean >= prev);
        prev = mean;
    }
}

TEST_CASE("search maximum matches the order-statistics expectation (K=99, zeta=48)") {
    RngStream rng(24, 0);
    const int zeta = 48, K = 99;
    double acc = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        auto u = random_regions(rng, zeta, 2);
        auto cand = random_regions(rng, K * zeta, 2);
        acc += similarity_search(u, cand, K).count;
    }
    const double mean = acc / trials;
    const double expectation = expected_similarity_max(zeta, 0.5, K);
    CHECK(std::abs(mean - expectation) / expectation < 0.03);
}

TEST_CASE("segmented_search with Z = 1 equals the plain search") {
    RngStream rng(25, 0);
    const int zeta = 24;
    std::vector<std::uint8_t> seq = random_regions(rng, 1200, 2);
    SearchSpace space{window_starts(1200, zeta, zeta), 1};
    auto u = random_regions(rng, zeta, 2);
    const auto seg = segmented_search(u, zeta, seq, space);
    const auto plain = similarity_search_windows(u, seq, space.starts);
    REQUIRE(seg.size() == 1);
    CHECK(seg[0].start == space.starts[plain.selected]);
    CHECK(seg[0].count == plain.count);
}

TEST_CASE("segmented_search: forced best in subset 2 leaves the tail for segment 2") {
    // Toy instance with 6 disjoint windows of length 2, Z = 2.
    const int zeta = 2;
    std::vector<std::uint8_t> seq{0, 1,  1, 1,  0, 0,  1, 0,  1, 1,  0, 1};
    SearchSpace space{{0, 2, 4, 6, 8, 10}, 2};
    // Segment 1 wants {1,1}: subset 1 = starts {0,2,4} has its best at 2.
    // Segment 2 wants {0,0}: subset 2 = {6,8,10} merged with leftover {4}.
    std::vector<std::uint8_t> u{1, 1, 0, 0};
    const auto picks = segmented_search(u, zeta, seq, space);
    REQUIRE(picks.size() == 2);
    CHECK(picks[0].start == 2);
    CHECK(picks[0].count == 2);
    CHECK(picks[1].start == 4); // leftover window {0,0} beats everything in subset 2
    CHECK(picks[1].count == 2);
    CHECK(picks[1].start > picks[0].start);

    // Exhaustive oracle over all ordered choices confirms per-segment greediness.
    int best1 = -1, best1_start = 0;
    for (int k = 0; k < 3; ++k) {
        int c = (seq[space.starts[k]] == 1) + (seq[space.starts[k] + 1] == 1);
        if (c > best1) {
            best1 = c;
            best1_start = space.starts[k];
        }
    }
    CHECK(picks[0].start == best1_start);
}

TEST_CASE("segmented_search keeps selected starts strictly increasing") {
    RngStream rng(26, 0);
    const int zeta = 12;
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::uint8_t> seq = random_regions(rng, 960, 2);
        SearchSpace space{window_starts(960, zeta, zeta), 4};
        auto u = random_regions(rng, zeta * 4, 2);
        const auto picks = segmented_search(u, zeta, seq, space);
        REQUIRE(picks.size() == 4);
        for (std::size_t z = 1; z < picks.size(); ++z)
            CHECK(picks[z].start > picks[z - 1].start);
    }
}

TEST_CASE("segmented_search reports exhaustion") {
    std::vector<std::uint8_t> seq{0, 1, 1, 0};
    SearchSpace space{{0, 2}, 3};
    std::vector<std::uint8_t> u{0, 1, 1, 0, 0, 0};
    CHECK_THROWS(segmented_search(u, 2, seq, space));
}

TEST_CASE("make_plan / apply_plan mapper semantics") {
    const SimilarityMap map = build_similarity_map(2, 16);
    RngStream rng(27, 0);
    const int zeta = 24;
    std::vector<int> usym(zeta), esym(zeta);
    for (int i = 0; i < zeta; ++i) {
        usym[i] = static_cast<int>(rng.next_below(2));
        esym[i] = static_cast<int>(rng.next_below(16));
    }

    // URLLC mapper: stream equals the URLLC points.
    const auto plan_u = make_plan(Mapper::urllc, usym, esym, map);
    const auto tx_u = apply_plan(plan_u, usym, esym, map);
    for (int i = 0; i < zeta; ++i) {
        CHECK_FALSE(tx_u[i].from_embb);
        CHECK(tx_u[i].point == map.urllc.points[usym[i]]);
    }

    // SRM: eMBB point iff same region; ESRM: eMBB point iff enhanced member.
    const auto plan_s = make_plan(Mapper::srm, usym, esym, map);
    const auto tx_s = apply_plan(plan_s, usym, esym, map);
    const auto plan_e = make_plan(Mapper::esrm, usym, esym, map);
    const auto tx_e = apply_plan(plan_e, usym, esym, map);
    for (int i = 0; i < zeta; ++i) {
        const bool same = map.region_of_high[esym[i]] == usym[i];
        CHECK(tx_s[i].from_embb == same);
        const bool enh = same && map.is_enhanced(usym[i], esym[i]);
        CHECK(tx_e[i].from_embb == enh);
        CHECK((tx_e[i].point == map.embb.points[esym[i]] ||
               tx_e[i].point == map.urllc.points[usym[i]]));
    }

    // All-same-region SRM keeps the eMBB block untouched.
    std::vector<int> in_region(zeta);
    for (int i = 0; i < zeta; ++i)
        in_region[i] = map.regions[usym[i]].members[rng.next_below(8)];
    const auto plan_keep = make_plan(Mapper::srm, usym, in_region, map);
    const auto tx_keep = apply_plan(plan_keep, usym, in_region, map);
    for (int i = 0; i < zeta; ++i) {
        CHECK(tx_keep[i].from_embb);
        CHECK(tx_keep[i].point == map.embb.points[in_region[i]]);
    }
    CHECK(plan_keep.similarity_count == zeta);
}

TEST_CASE("one-RB search windows over a 2400-symbol slot give 99 candidates") {
    // 2 OFDM symbols per RE, 1200 REs, 48-symbol URLLC block, 24-symbol step.
    CHECK(window_starts(2400, 48, 24).size() == 99);
    CHECK(window_starts(2400, 48, 24, 10).size() == 10); // cap honoured
}

TEST_CASE("make_plan rejects SRM/ESRM when the URLLC order is higher") {
    const SimilarityMap map = build_similarity_map(4, 2);
    std::vector<int> usym{0, 1}, esym{0, 1};
    CHECK_THROWS_AS(make_plan(Mapper::srm, usym, esym, map), std::invalid_argument);
    CHECK_THROWS_AS(make_plan(Mapper::esrm, usym, esym, map), std::invalid_argument);
    CHECK_NOTHROW(make_plan(Mapper::urllc, usym, esym, map));
}

TEST_CASE("BPSK block {0,1,1,0} is fully region-similar to 4-QAM {00,11,10,01}") {
    const SimilarityMap map = build_similarity_map(2, 4);
    auto embb_index = [&](const std::string& label) {
        for (int j = 0; j < 4; ++j)
            if (map.embb.labels[j] == label) return j;
        return -1;
    };
    const std::vector<int> usym{0, 1, 1, 0};
    const std::vector<int> esym{embb_index("00"), embb_index("11"), embb_index("10"),
                                embb_index("01")};
    const auto plan = make_plan(Mapper::urllc, usym, esym, map);
    CHECK(plan.similarity_count == 4);
}

TEST_CASE("select_mapper activation logic") {
    const SimilarityMap m16 = build_similarity_map(2, 16);
    const SimilarityMap m4 = build_similarity_map(2, 4);

    // A loose target always admits the similarity mapper.
    CHECK(select_mapper(2, 16, SnrPoint::from_db(14), Channel::awgn, 0.999, m16) ==
          Mapper::esrm);
    // (2,4) has no strict enhanced subset, so SRM is the candidate.
    CHECK(select_mapper(2, 4, SnrPoint::from_db(14), Channel::awgn, 0.999, m4) == Mapper::srm);
    // Targets below even the unpunctured channel SER force the URLLC mapper.
    const double floor_ser = channel_ser(2, SnrPoint::from_db(6), Channel::rayleigh);
    CHECK(select_mapper(2, 16, SnrPoint::from_db(6), Channel::rayleigh, floor_ser * 0.5, m16) ==
          Mapper::urllc);
    // Higher or equal URLLC order always uses the URLLC mapper.
    CHECK(select_mapper(4, 4, SnrPoint::from_db(14), Channel::awgn, 0.5,
                        build_similarity_map(4, 4)) == Mapper::urllc);
    CHECK(select_mapper(16, 4, SnrPoint::from_db(14), Channel::awgn, 0.5,
                        build_similarity_map(16, 4)) == Mapper::urllc);

    // Decision matches the direct threshold comparison on the predicted SER.
    for (double eps : {1e-4, 1e-3, 1e-2, 0.1}) {
        const SnrPoint g = SnrPoint::from_db(14);
        const double p1 = urllc_ser(2, 16, g, Channel::rayleigh, Mapper::esrm);
        const Mapper got = select_mapper(2, 16, g, Channel::rayleigh, eps, m16);
        CHECK(got == (p1 > eps ? Mapper::urllc : Mapper::esrm));
    }
    CHECK_THROWS_AS(select_mapper(2, 16, SnrPoint::from_db(14), Channel::awgn, 0.0, m16),
                    std::invalid_argument);
}
