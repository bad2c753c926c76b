#pragma once

// Closed-form evaluation layer: expected similarity (order statistics over
// the search), effectively punctured symbol split, eMBB/URLLC SER under
// puncturing, asymptotic limits, power loss and the eMBB loss function.

#include <span>
#include <vector>

#include "punctsim/similarity.hpp"
#include "punctsim/types.hpp"

namespace punctsim {

struct PuncturedSplit {
    double effective;     // symbols whose replacement lies outside the similarity class
    double non_effective; // symbols covered by the mapper's similarity class
};

/// Per-modulation share of the eMBB load and the URLLC traffic puncturing it.
struct ModLoad {
    int m = 2;
    double p_m = 1.0;
    std::vector<std::pair<int, double>> l_nm; // (URLLC order n, punctured symbols)
    double l_total() const;
};

struct LoadProfile {
    double L = 1200.0;          // eMBB symbols per slot
    std::vector<ModLoad> mods;
    int zeta = 24;              // URLLC block size in symbols
    int K = 1200;               // nominal search-space size
    int segments = 1;           // URLLC segments per packet

    double L_m(const ModLoad& e) const { return e.p_m * L; }
    void validate() const;
};

enum class LossModel { linear, generalized };

/// Binomial(n, p) CDF at k, evaluated in log space (exact summation, n <= 64).
double binomial_cdf(int k, int n, double p);

/// Expected maximum match count over `candidates` iid length-zeta blocks with
/// per-symbol match probability eta. candidates <= 1 degenerates to zeta*eta.
double expected_similarity_max(int zeta, double eta, double candidates);

/// Expected similarity under the full search (exponent L_m - zeta).
double expected_similarity(int zeta, double l_nm, double L_m, double eta);

PuncturedSplit effective_punctured(int zeta, double l_nm, double L_m, double eta);

/// Per-segment candidate count the search actually enjoys under the profile.
double search_candidates(const LoadProfile& profile, double L_m);

/// Match probability per punctured symbol for a mapper policy (enhanced sets
/// drive ESRM; plain regions drive URLLC/SRM).
double match_probability(const SimilarityMap& map, Mapper mapper, int zeta, double candidates);

struct EffectiveSer {
    double exact; // cross-region double sum with exact decision-cell tails
    double bound; // 1 - P_n(gamma)/(m-1)
};

/// SER of effectively punctured symbols (URLLC symbol from a foreign region
/// into the puncture-unaware eMBB receiver).
EffectiveSer ser_effective(int n, int m, SnrPoint snr, Channel channel);

/// SER of non-effectively punctured symbols. Same order or SRM/ESRM: channel
/// only. URLLC mapper with n < m, or n > m: in-region double sum with exact
/// decision-cell tails.
double ser_non_effective(int n, int m, SnrPoint snr, Channel channel, Mapper mapper);

/// Literal minimum-distance form of the in-region double sum,
/// P_err(s_j | s_i) = P_m(gamma d^{i,j}^2); reference comparison only.
double ser_non_effective_min_distance(int n, int m, SnrPoint snr, Channel channel);

/// SER of the non-substituted symbols under ESRM (same-region non-enhanced
/// and cross-region pairs pooled).
double ser_modified_esrm(int n, int m, SnrPoint snr, Channel channel);

/// Total eMBB SER under puncturing (total-probability decomposition).
double embb_ser(const LoadProfile& profile, SnrPoint snr, Channel channel, Mapper mapper);

/// With l_nm as the only punctured mass (no similarity, eta = 0 semantics).
double embb_ser_no_similarity(const LoadProfile& profile, SnrPoint snr, Channel channel);

/// High-SNR limit: sum of effective puncture ratios.
double embb_ser_high_snr(const LoadProfile& profile, Mapper mapper);

/// High-similarity limit: channel plus non-effective terms only.
double embb_ser_high_similarity(const LoadProfile& profile, SnrPoint snr, Channel channel,
                                Mapper mapper);

/// Substitution probability implied by the reference load (zeta = 24,
/// L_m = 1200 full search) for a mapper policy.
double default_substitution_prob(int n, int m, Mapper mapper, int zeta = 24,
                                 double L_m = 1200.0);

/// URLLC SER under a mapper; substitution_prob < 0 selects the reference load
/// default. URLLC mapper returns the pure channel SER.
double urllc_ser(int n, int m, SnrPoint snr_u, Channel channel, Mapper mapper,
                 double substitution_prob = -1.0);

/// Equivalent power loss in dB (negative = loss).
double urllc_power_loss_db(int n, int m, Mapper mapper, double substitution_prob = -1.0);

/// Expected eMBB loss fraction; `generalized` weighs punctured symbols by
/// their error probabilities.
double embb_loss(const LoadProfile& profile, SnrPoint snr, Channel channel, Mapper mapper,
                 LossModel model);

/// Loss per punctured symbol (generalized loss normalised by the punctured
/// fraction); the quantity plotted against K.
double embb_loss_relative(const LoadProfile& profile, SnrPoint snr, Channel channel,
                          Mapper mapper);

/// Fraction of blocks whose measured SER meets the target.
double reliability(std::span<const double> block_ser_samples, double target);

} // namespace punctsim
