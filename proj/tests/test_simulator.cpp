#include <doctest.h>

#include <cmath>
#include <numeric>

#include "punctsim/rng.hpp"
#include "punctsim/simulator.hpp"

using namespace punctsim;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.urllc_order = 2;
    cfg.embb_order_fixed = 2;
    cfg.num_users = 1;
    cfg.sttis = 600;
    cfg.coherence_sttis = 1;
    cfg.power_dbm = 20.0;
    cfg.seed = 7;
    return cfg;
}

} // namespace

TEST_CASE("adapt_modulation endpoints and bisection-consistent switch points") {
    CHECK(adapt_modulation(SnrPoint::from_db(60)) == 64);
    CHECK(adapt_modulation(SnrPoint(0.0)) == 2);

    for (int m : {4, 16, 64}) {
        // Bisect the gamma where the Rayleigh SER crosses 0.01.
        double lo = 1.0, hi = 1e8;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (channel_ser_rayleigh(m, SnrPoint(mid)) > 0.01 ? lo : hi) = mid;
        }
        const double thresh_db = 10.0 * std::log10(hi);
        const int below = adapt_modulation(SnrPoint::from_db(thresh_db - 0.01));
        const int above = adapt_modulation(SnrPoint::from_db(thresh_db + 0.01));
        CHECK(above >= m);
        CHECK(below < m);
    }
}

TEST_CASE("generate_slot conserves the RE budget across users") {
    ExperimentConfig cfg;
    cfg.num_users = 10;
    std::vector<int> mods(10, 4);
    const SlotData slot = generate_slot(cfg, mods, 3);
    REQUIRE(slot.embb_symbols.size() == 1200);
    std::vector<int> counts(10, 0);
    for (int owner : slot.owner) ++counts[owner];
    for (int c : counts) CHECK(c == 120);
    for (auto s : slot.embb_symbols) CHECK(s < 4);
}

TEST_CASE("arrival process mean matches lambda over many sTTIs") {
    ExperimentConfig cfg;
    cfg.num_users = 1;
    cfg.L = 24;
    cfg.traffic.lambda = 7.0;
    std::vector<int> mods{2};
    double acc = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) acc += generate_slot(cfg, mods, t).arrivals;
    const double expected = 7.0 * 0.143;
    CHECK(std::abs(acc / n - expected) / expected < 0.02);
}

TEST_CASE("lambda = 0 means no punctures at all") {
    ExperimentConfig cfg = base_config();
    cfg.traffic.lambda = 0.0;
    const SerReport rep = run_experiment(cfg);
    CHECK(rep.punctured_symbols == 0);
    CHECK(rep.placed_segments == 0);
    CHECK(rep.urllc_symbols == 0);
}

TEST_CASE("seed determinism: identical configs give bit-identical reports") {
    ExperimentConfig cfg = base_config();
    cfg.traffic.lambda = 7.0;
    cfg.sttis = 300;
    const SerReport a = run_experiment(cfg);
    const SerReport b = run_experiment(cfg);
    CHECK(a.embb_errors == b.embb_errors);
    CHECK(a.urllc_errors == b.urllc_errors);
    CHECK(a.punctured_symbols == b.punctured_symbols);
    CHECK(a.match_fraction == b.match_fraction);
    cfg.seed = 8;
    const SerReport c = run_experiment(cfg);
    CHECK(a.embb_errors != c.embb_errors);
}

TEST_CASE("conservation: punctured symbols equal placed URLLC symbols") {
    ExperimentConfig cfg = base_config();
    cfg.sttis = 400;
    const SerReport rep = run_experiment(cfg);
    CHECK(rep.punctured_symbols == rep.placed_segments * cfg.traffic.zeta);
    CHECK(rep.punctured_fraction > 0.05);
    CHECK(rep.punctured_fraction < 0.11);
}

TEST_CASE("channel-only operation matches the Rayleigh closed form") {
    ExperimentConfig cfg = base_config();
    cfg.traffic.lambda = 0.0;
    cfg.embb_order_fixed = 4;
    cfg.sttis = 4000;
    cfg.power_dbm = 6.0; // gamma_bar ~ 147: SER ~ 1e-2
    const SerReport rep = run_experiment(cfg);
    const double gbar = mean_snr(cfg, 300.0); // single user sits at 300 m
    const double theory = channel_ser_rayleigh(4, SnrPoint(gbar));
    CHECK(std::abs(rep.embb_ser - theory) / theory < 0.10);
}

TEST_CASE("URLLC mapper leaves the URLLC SER at the unpunctured channel value") {
    ExperimentConfig cfg = base_config();
    cfg.sttis = 4000;
    cfg.mapper = Mapper::urllc;
    cfg.power_dbm = 10.0;
    const SerReport rep = run_experiment(cfg);
    const double theory = channel_ser_rayleigh(2, SnrPoint(mean_snr(cfg, cfg.urllc_distance)));
    CHECK(std::abs(rep.urllc_ser - theory) <= std::max(rep.urllc_ci_halfwidth, 1e-6) * 1.2);
}

TEST_CASE("eMBB SER is non-decreasing in the URLLC load") {
    double prev = -1.0;
    for (double lambda : {0.0, 3.5, 7.0}) {
        ExperimentConfig cfg = base_config();
        cfg.traffic.lambda = lambda;
        cfg.sttis = 1500;
        cfg.power_dbm = 30.0; // puncture-dominated region
        const SerReport rep = run_experiment(cfg);
        CHECK(rep.embb_ser >= prev);
        prev = rep.embb_ser;
    }
}

TEST_CASE("match fraction approaches the order-statistics prediction") {
    ExperimentConfig cfg = base_config();
    cfg.sttis = 3000;
    cfg.K = 1200;
    const SerReport rep = run_experiment(cfg);
    // Realised per-segment pools drive the expectation.
    const double expected = expected_similarity_max(24, 0.5, rep.mean_pool_size) / 24.0;
    CHECK(std::abs(rep.match_fraction - expected) / expected < 0.03);

    // Baseline: single candidate, match fraction = eta.
    cfg.scheme = Scheme::baseline;
    const SerReport base = run_experiment(cfg);
    CHECK(std::abs(base.match_fraction - 0.5) < 0.02);
    CHECK(base.mean_pool_size == doctest::Approx(1.0));
}

TEST_CASE("baseline eMBB SER plateau sits above the proposed scheme") {
    ExperimentConfig cfg = base_config();
    cfg.sttis = 2500;
    cfg.power_dbm = 31.0; // ~40 dB gamma at 300 m
    const SerReport prop = run_experiment(cfg);
    cfg.scheme = Scheme::baseline;
    const SerReport base = run_experiment(cfg);
    CHECK(base.embb_ser > prop.embb_ser * 1.5);
}

TEST_CASE("invalid configurations are rejected") {
    ExperimentConfig cfg = base_config();
    cfg.traffic.zeta = 23; // does not divide the slot
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.urllc_order = 8;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.symbols_per_re = 3;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("AWGN channel option matches the AWGN closed form") {
    ExperimentConfig cfg = base_config();
    cfg.channel = Channel::awgn;
    cfg.traffic.lambda = 0.0;
    cfg.embb_order_fixed = 4;
    cfg.sttis = 2000;
    cfg.power_dbm = -6.0; // gamma_bar ~ 9.3: SER ~ 4e-3
    const SerReport rep = run_experiment(cfg);
    const double theory = channel_ser_awgn_exact(4, SnrPoint(mean_snr(cfg, 300.0)));
    CHECK(std::abs(rep.embb_ser - theory) / theory < 0.10);
}

TEST_CASE("smaller URLLC segments improve the eMBB SER") {
    double prev = 1.0;
    for (int zeta : {48, 24, 12}) {
        ExperimentConfig cfg = base_config();
        cfg.traffic.zeta = zeta;
        cfg.sttis = 2000;
        cfg.power_dbm = 31.0; // puncture-dominated
        const SerReport rep = run_experiment(cfg);
        CHECK(rep.embb_ser < prev);
        prev = rep.embb_ser;
    }
}

TEST_CASE("benchmark produces sane timings") {
    const BenchmarkResult res = benchmark_search({64, 256}, 24, 50, 3);
    REQUIRE(res.rows.size() == 2);
    for (const auto& row : res.rows) {
        CHECK(row.median_us > 0.0);
        CHECK(row.p99_us >= row.median_us);
    }
    CHECK(res.rows[1].median_us > res.rows[0].median_us);
    CHECK(res.fit_slope_us_per_k > 0.0);
}
