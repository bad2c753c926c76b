#include "punctsim/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "punctsim/analytic.hpp"
#include "punctsim/kernels.hpp"

namespace punctsim {

SearchResult similarity_search(std::span<const std::uint8_t> urllc_regions,
                               std::span<const std::uint8_t> candidates, int K) {
    const std::size_t zeta = urllc_regions.size();
    if (K < 1) throw std::invalid_argument("similarity_search: empty candidate set");
    if (zeta == 0 || candidates.size() != static_cast<std::size_t>(K) * zeta)
        throw std::invalid_argument("similarity_search: candidate/URLLC length mismatch");

    SearchResult r;
    r.counts.resize(K);
    for (int k = 0; k < K; ++k) {
        const int c = kernels::count_matches(candidates.data() + std::size_t(k) * zeta,
                                             urllc_regions.data(), zeta);
        r.counts[k] = c;
        if (c > r.count || k == 0) {
            r.count = c;
            r.selected = k;
        }
        r.comparisons += static_cast<std::int64_t>(zeta);
    }
    return r;
}

SearchResult similarity_search_windows(std::span<const std::uint8_t> urllc_regions,
                                       std::span<const std::uint8_t> sequence,
                                       std::span<const int> starts) {
    const std::size_t zeta = urllc_regions.size();
    if (starts.empty()) throw std::invalid_argument("similarity_search: empty candidate set");
    SearchResult r;
    r.counts.resize(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (starts[k] < 0 || static_cast<std::size_t>(starts[k]) + zeta > sequence.size())
            throw std::invalid_argument("similarity_search: window outside sequence");
        const int c =
            kernels::count_matches(sequence.data() + starts[k], urllc_regions.data(), zeta);
        r.counts[k] = c;
        if (c > r.count || k == 0) {
            r.count = c;
            r.selected = static_cast<int>(k);
        }
        r.comparisons += static_cast<std::int64_t>(zeta);
    }
    return r;
}

std::vector<int> window_starts(int sequence_len, int zeta, int step, int max_count) {
    if (zeta < 1 || step < 1) throw std::invalid_argument("window_starts: bad geometry");
    std::vector<int> starts;
    for (int s = 0; s + zeta <= sequence_len; s += step) {
        if (max_count >= 0 && static_cast<int>(starts.size()) >= max_count) break;
        starts.push_back(s);
    }
    return starts;
}

std::vector<SegmentChoice> segmented_search(std::span<const std::uint8_t> urllc_regions,
                                            int zeta, std::span<const std::uint8_t> sequence,
                                            const SearchSpace& space) {
    const int Z = space.subsets;
    if (Z < 1 || zeta < 1 || urllc_regions.size() != static_cast<std::size_t>(zeta) * Z)
        throw std::invalid_argument("segmented_search: segment geometry mismatch");
    if (space.starts.empty()) throw std::invalid_argument("segmented_search: no candidates");
    if (!std::is_sorted(space.starts.begin(), space.starts.end()))
        throw std::invalid_argument("segmented_search: starts must be ordered");

    const std::size_t total = space.starts.size();
    std::vector<SegmentChoice> chosen;
    chosen.reserve(Z);

    // Subset z owns starts [z*total/Z, (z+1)*total/Z); the unconsumed tail of
    // the previous subset rolls forward.
    std::size_t carry_begin = 0; // first candidate index still eligible
    for (int z = 0; z < Z; ++z) {
        const std::size_t subset_end = (z + 1 == Z) ? total : (std::size_t(z) + 1) * total / Z;
        const std::size_t lo = carry_begin; // leftover tail of subset z-1 merges in
        if (lo >= subset_end)
            throw std::runtime_error("segmented_search: candidates exhausted for segment " +
                                     std::to_string(z));
        std::vector<int> pool(space.starts.begin() + lo, space.starts.begin() + subset_end);
        auto urllc_seg = urllc_regions.subspan(std::size_t(z) * zeta, zeta);
        SearchResult r = similarity_search_windows(urllc_seg, sequence, pool);
        chosen.push_back({pool[r.selected], r.count});
        carry_begin = lo + r.selected + 1;
    }
    return chosen;
}

PuncturingPlan make_plan(Mapper mapper, std::span<const int> urllc_symbols,
                         std::span<const int> embb_symbols, const SimilarityMap& map) {
    if (urllc_symbols.size() != embb_symbols.size())
        throw std::invalid_argument("make_plan: length mismatch");
    if (mapper != Mapper::urllc && map.n > map.m)
        throw std::invalid_argument("make_plan: SRM/ESRM require URLLC order <= eMBB order");
    PuncturingPlan plan;
    plan.mapper_used = mapper;
    plan.per_symbol.resize(urllc_symbols.size(), SymbolAction::send_urllc);
    for (std::size_t t = 0; t < urllc_symbols.size(); ++t) {
        const int ru = map.urllc_is_low ? urllc_symbols[t] : map.region_of_high[urllc_symbols[t]];
        const int re = map.urllc_is_low ? map.region_of_high[embb_symbols[t]] : embb_symbols[t];
        const bool same = ru == re;
        if (same) ++plan.similarity_count;
        if (mapper == Mapper::srm && same)
            plan.per_symbol[t] = SymbolAction::keep_embb;
        else if (mapper == Mapper::esrm && same && map.urllc_is_low &&
                 map.is_enhanced(re, embb_symbols[t]))
            plan.per_symbol[t] = SymbolAction::keep_embb;
    }
    return plan;
}

std::vector<TxSymbol> apply_plan(const PuncturingPlan& plan, std::span<const int> urllc_symbols,
                                 std::span<const int> embb_symbols, const SimilarityMap& map) {
    if (plan.per_symbol.size() != urllc_symbols.size() ||
        urllc_symbols.size() != embb_symbols.size())
        throw std::invalid_argument("apply_plan: length mismatch");
    std::vector<TxSymbol> out(urllc_symbols.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        if (plan.per_symbol[t] == SymbolAction::keep_embb)
            out[t] = {true, embb_symbols[t], map.embb.points[embb_symbols[t]]};
        else
            out[t] = {false, urllc_symbols[t], map.urllc.points[urllc_symbols[t]]};
    }
    return out;
}

Mapper select_mapper(int n, int m, SnrPoint snr_u, Channel channel, double epsilon_u,
                     const SimilarityMap& map, double substitution_prob) {
    if (epsilon_u <= 0.0 || epsilon_u >= 1.0)
        throw std::invalid_argument("select_mapper: epsilon_u must lie in (0,1)");
    if (n >= m) return Mapper::urllc;
    bool strict_subset = false;
    for (const auto& r : map.regions)
        if (r.enhanced.size() < r.members.size()) strict_subset = true;
    const Mapper candidate = strict_subset ? Mapper::esrm : Mapper::srm;
    const double p1 = urllc_ser(n, m, snr_u, channel, candidate, substitution_prob);
    return p1 > epsilon_u ? Mapper::urllc : candidate;
}

} // namespace punctsim
