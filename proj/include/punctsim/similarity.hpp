#pragma once

// Similarity regions over an overlaid (URLLC order n, eMBB order m)
// constellation pair: region partition, enhanced subsets, boundary distances
// and the similarity probability eta.

#include <string>
#include <vector>

#include "punctsim/constellation.hpp"
#include "punctsim/types.hpp"

namespace punctsim {

enum class Similarity { absolute, strong, weak };

inline const char* to_string(Similarity s) {
    switch (s) {
        case Similarity::absolute: return "absolute";
        case Similarity::strong: return "strong";
        default: return "weak";
    }
}

/// Slack and reference SNR for the error-probability comparisons that decide
/// strong vs weak similarity.
struct EpsilonPolicy {
    double epsilon = 1e-2;
    SnrPoint reference_snr = SnrPoint::from_db(10.0);
};

struct SimilarityRegion {
    int region_symbol;             // low-order symbol index anchoring the region
    std::vector<int> members;      // high-order symbol indices, ascending
    std::vector<int> enhanced;     // members passing the epsilon similarity test
};

struct SimilarityMap {
    int n = 0; // URLLC order
    int m = 0; // eMBB order
    Constellation urllc;
    Constellation embb;
    bool urllc_is_low = true;      // URLLC side has min(n, m) points

    std::vector<SimilarityRegion> regions;  // size min(n,m); region i anchored at low symbol i
    std::vector<int> region_of_high;        // high-order symbol -> region index
    std::vector<std::vector<double>> distances; // d^{i,j}: [low i][high j]
    std::vector<double> self_distances;         // d^{i}
    EpsilonPolicy policy;                       // policy used for the stored enhanced sets

    const Constellation& low() const { return urllc_is_low ? urllc : embb; }
    const Constellation& high() const { return urllc_is_low ? embb : urllc; }
    int low_order() const { return std::min(n, m); }
    int high_order() const { return std::max(n, m); }
    bool is_enhanced(int region, int high_symbol) const;
};

SimilarityMap build_similarity_map(int n, int m, EpsilonPolicy policy = {});

/// Similarity class of a (region-index-symbol, mapping-symbol) pair.
Similarity classify_pair(const SimilarityMap& map, int region_symbol, int mapping_symbol,
                         const EpsilonPolicy& policy);

/// Probability that independently drawn URLLC/eMBB symbols share a region.
double eta(const SimilarityMap& map, std::span<const double> urllc_priors,
           std::span<const double> embb_priors);
double eta_uniform(const SimilarityMap& map);

/// Same, counting only enhanced high-order symbols as similar.
double eta_enhanced_uniform(const SimilarityMap& map);

/// Minimum distance from high-order symbol j to the ML decision boundary of
/// low-order symbol i.
double boundary_distance(const SimilarityMap& map, int i, int j);

/// Structured-text dump (regions, enhanced sets, distance matrix).
std::string dump(const SimilarityMap& map);

} // namespace punctsim
