#pragma once

// Monte Carlo link simulator: Poisson URLLC arrivals puncture a Rayleigh
// block-fading eMBB downlink; the eMBB receiver stays puncture-unaware and
// the URLLC receiver uses its native demapper.

#include <cstdint>
#include <string>
#include <vector>

#include "punctsim/analytic.hpp"
#include "punctsim/scheduler.hpp"
#include "punctsim/types.hpp"

namespace punctsim {

struct TrafficModel {
    double lambda = 7.0;       // URLLC packets per millisecond
    int packet_bits = 96;
    int zeta = 24;             // segment size in symbols (1 RB)
    double stti_ms = 0.143;
};

struct ExperimentConfig {
    Scheme scheme = Scheme::proposed;  // baseline pins K = 1
    Mapper mapper = Mapper::urllc;
    int urllc_order = 2;
    int embb_order_fixed = 0;          // 0 = adaptive per user
    TrafficModel traffic;
    int L = 1200;                      // downlink REs
    int symbols_per_re = 1;            // OFDM symbols per RE per sTTI
    int K = 1200;                      // requested search-space size
    int lookahead_sttis = 7;           // placement window (1 ms latency budget)
    int num_users = 10;
    std::vector<double> user_distance; // metres; default ring when empty
    double urllc_distance = 500.0;
    double pathloss_exponent = 3.0;
    double noise_power = 1e-9;
    double power_dbm = 10.0;
    Channel channel = Channel::rayleigh;
    int coherence_sttis = 14;
    int sttis = 1000;                  // simulated sTTIs
    std::uint64_t seed = 1;
    EpsilonPolicy policy;
    double reliability_target = 0.01;
    bool measure_urllc = true;
    double adapt_target_ser = 0.01;
};

struct SerReport {
    double embb_ser = 0.0;
    std::uint64_t embb_errors = 0, embb_symbols = 0;
    double embb_ci_halfwidth = 0.0; // 95% binomial (normal approximation)
    double urllc_ser = 0.0;
    std::uint64_t urllc_errors = 0, urllc_symbols = 0;
    double urllc_ci_halfwidth = 0.0;
    double reliability = 0.0;                  // over all blocks
    std::vector<double> per_user_reliability;
    double loss_fraction = 0.0;                // errors among punctured / punctured
    double punctured_fraction = 0.0;           // punctured / total eMBB symbols
    double match_fraction = 0.0;               // empirical q of placed segments
    double mean_pool_size = 0.0;               // realised per-segment candidate count
    std::uint64_t punctured_symbols = 0, placed_segments = 0;
    std::vector<int> user_modulation;          // adapted m per user
    bool low_trial_warning = false;
    std::string warning;
};

/// Largest m in {4, 16, 64} whose Rayleigh channel SER meets the target,
/// BPSK otherwise.
int adapt_modulation(SnrPoint gamma_e, double target_ser = 0.01);

/// Deterministic user distance ladder (metres) used when none is configured.
std::vector<double> default_user_ring(int users);

/// One slot of eMBB symbols plus the URLLC arrivals of the preceding sTTI.
struct SlotData {
    std::vector<std::uint16_t> embb_symbols; // per symbol position
    std::vector<int> owner;                  // user index per position
    int arrivals = 0;                        // packets arriving this sTTI
};
SlotData generate_slot(const ExperimentConfig& cfg, const std::vector<int>& user_mod, int stti);

/// Average linear SNR of a user at the configured power.
double mean_snr(const ExperimentConfig& cfg, double distance_m);

SerReport run_experiment(const ExperimentConfig& cfg);

struct BenchmarkRow {
    int K = 0;
    double median_us = 0.0;
    double p99_us = 0.0;
};
struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    double fit_slope_us_per_k = 0.0;
    double fit_intercept_us = 0.0;
    double r_squared = 0.0;
};

/// Wall-time of the similarity search per K (single-threaded, warmed up).
BenchmarkResult benchmark_search(const std::vector<int>& k_grid, int zeta, int repetitions,
                                 std::uint64_t seed = 1);

} // namespace punctsim
