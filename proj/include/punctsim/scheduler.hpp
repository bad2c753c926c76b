#pragma once

// Mapper selection (activation check), the O(K) similarity search and the
// ordered segmented search, plus plan application to a symbol window.

#include <cstdint>
#include <span>
#include <vector>

#include "punctsim/similarity.hpp"
#include "punctsim/types.hpp"

namespace punctsim {

enum class SymbolAction : std::uint8_t { send_urllc, keep_embb };

struct PuncturingPlan {
    int selected_index = -1;                 // winning candidate k*
    std::vector<SymbolAction> per_symbol;    // length zeta
    Mapper mapper_used = Mapper::urllc;
    int similarity_count = 0;                // c_{k*}
};

struct SearchResult {
    int selected = 0;
    int count = 0;
    std::int64_t comparisons = 0; // region comparisons performed (= K * zeta)
    std::vector<int> counts;      // c_k per candidate
};

/// Candidate search space; `starts` are ordered window start positions into an
/// eMBB region-id sequence.
struct SearchSpace {
    std::vector<int> starts;
    int subsets = 1; // ordered equal partitions of the starts, one per segment
};

/// Window start positions stepping through a sequence (K candidates at the
/// given step, capped by the sequence length).
std::vector<int> window_starts(int sequence_len, int zeta, int step, int max_count = -1);

/// Argmax of per-candidate match counts over a K x zeta candidate matrix
/// (row-major). Lowest index wins ties. Exactly K * zeta comparisons.
SearchResult similarity_search(std::span<const std::uint8_t> urllc_regions,
                               std::span<const std::uint8_t> candidates, int K);

/// Same over windows of a region-id sequence.
SearchResult similarity_search_windows(std::span<const std::uint8_t> urllc_regions,
                                       std::span<const std::uint8_t> sequence,
                                       std::span<const int> starts);

struct SegmentChoice {
    int start = 0;  // selected window start
    int count = 0;  // c_{k*}
};

/// Ordered segmented search over space.subsets segments: segment z draws from
/// subset z merged with the unconsumed tail of subset z-1; selected starts are
/// strictly increasing. Throws if a segment runs out of candidates.
std::vector<SegmentChoice> segmented_search(std::span<const std::uint8_t> urllc_regions,
                                            int zeta, std::span<const std::uint8_t> sequence,
                                            const SearchSpace& space);

/// Per-symbol actions for a mapper over a chosen eMBB window.
PuncturingPlan make_plan(Mapper mapper, std::span<const int> urllc_symbols,
                         std::span<const int> embb_symbols, const SimilarityMap& map);

struct TxSymbol {
    bool from_embb = false;
    int index = 0; // symbol index in the source constellation
    cd point;
};

/// Transmitted stream for a plan: URLLC point, or the kept eMBB point where
/// the plan says so.
std::vector<TxSymbol> apply_plan(const PuncturingPlan& plan, std::span<const int> urllc_symbols,
                                 std::span<const int> embb_symbols, const SimilarityMap& map);

/// Mapper activation: SRM/ESRM if the predicted URLLC SER meets the
/// target, URLLC mapper otherwise. ESRM is used when the enhanced sets are a
/// strict subset of the regions; n >= m always selects the URLLC mapper.
Mapper select_mapper(int n, int m, SnrPoint snr_u, Channel channel, double epsilon_u,
                     const SimilarityMap& map, double substitution_prob = -1.0);

} // namespace punctsim
