#include "punctsim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace punctsim {

namespace {

// P(low-order receiver decodes something other than region symbol x | point sent).
double misdetect_probability(const Constellation& low, int region_symbol, cd sent,
                             double gamma) {
    return 1.0 - cell_probability(low, region_symbol, sent, gamma);
}

} // namespace

bool SimilarityMap::is_enhanced(int region, int high_symbol) const {
    const auto& e = regions[region].enhanced;
    return std::find(e.begin(), e.end(), high_symbol) != e.end();
}

SimilarityMap build_similarity_map(int n, int m, EpsilonPolicy policy) {
    require_order(n);
    require_order(m);
    SimilarityMap map;
    map.n = n;
    map.m = m;
    map.urllc = build_constellation(n);
    map.embb = build_constellation(m);
    map.urllc_is_low = n <= m;
    map.policy = policy;

    const Constellation& low = map.low();
    const Constellation& high = map.high();
    const int q = map.low_order();
    const int h = map.high_order();

    map.regions.resize(q);
    for (int i = 0; i < q; ++i) map.regions[i].region_symbol = i;
    map.region_of_high.assign(h, -1);

    // Each high-order point joins the region of its nearest low-order point;
    // equidistant points go to the lower low-order index.
    for (int j = 0; j < h; ++j) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < q; ++i) {
            const double d = std::abs(high.points[j] - low.points[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        map.region_of_high[j] = best;
        map.regions[best].members.push_back(j);
    }

    map.distances.assign(q, std::vector<double>(h, 0.0));
    map.self_distances.assign(q, 0.0);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < h; ++j)
            map.distances[i][j] = low.cells[i].boundary_distance(high.points[j]);
        map.self_distances[i] = low.cells[i].boundary_distance(low.points[i]);
    }

    for (auto& region : map.regions) {
        for (int j : region.members) {
            const Similarity s = classify_pair(map, region.region_symbol, j, policy);
            if (s != Similarity::weak) region.enhanced.push_back(j);
        }
    }
    return map;
}

Similarity classify_pair(const SimilarityMap& map, int region_symbol, int mapping_symbol,
                         const EpsilonPolicy& policy) {
    if (region_symbol < 0 || region_symbol >= map.low_order())
        throw std::invalid_argument("classify_pair: bad region symbol");
    if (map.region_of_high.at(mapping_symbol) != region_symbol)
        throw std::invalid_argument("classify_pair: mapping symbol not in this region");
    if (policy.epsilon < 0.0 || policy.epsilon > 1.0)
        throw std::invalid_argument("classify_pair: epsilon outside [0,1]");

    const double gamma = policy.reference_snr.gamma();
    const Constellation& low = map.low();
    const double p_self =
        misdetect_probability(low, region_symbol, low.points[region_symbol], gamma);
    const double p_map =
        misdetect_probability(low, region_symbol, map.high().points[mapping_symbol], gamma);

    const double diff = p_self - p_map;
    if (diff >= 0.0) return Similarity::absolute;
    if (diff >= -policy.epsilon) return Similarity::strong;
    return Similarity::weak;
}

double eta(const SimilarityMap& map, std::span<const double> urllc_priors,
           std::span<const double> embb_priors) {
    auto check = [](std::span<const double> p, int n, const char* which) {
        if (static_cast<int>(p.size()) != n)
            throw std::invalid_argument(std::string("eta: ") + which + " prior size mismatch");
        double s = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument(std::string("eta: ") + which +
                                        " priors do not sum to 1");
    };
    check(urllc_priors, map.n, "urllc");
    check(embb_priors, map.m, "embb");

    const auto& low_p = map.urllc_is_low ? urllc_priors : embb_priors;
    const auto& high_p = map.urllc_is_low ? embb_priors : urllc_priors;
    double total = 0.0;
    for (const auto& region : map.regions) {
        double mass_high = 0.0;
        for (int j : region.members) mass_high += high_p[j];
        total += low_p[region.region_symbol] * mass_high;
    }
    return total;
}

double eta_uniform(const SimilarityMap& map) {
    std::vector<double> pu(map.n, 1.0 / map.n), pe(map.m, 1.0 / map.m);
    return eta(map, pu, pe);
}

double eta_enhanced_uniform(const SimilarityMap& map) {
    double total = 0.0;
    for (const auto& region : map.regions)
        total += (1.0 / map.low_order()) *
                 (static_cast<double>(region.enhanced.size()) / map.high_order());
    return total;
}

double boundary_distance(const SimilarityMap& map, int i, int j) {
    return map.distances.at(i).at(j);
}

std::string dump(const SimilarityMap& map) {
    std::ostringstream os;
    os << "similarity-map n=" << map.n << " m=" << map.m
       << " low=" << (map.urllc_is_low ? "urllc" : "embb")
       << " epsilon=" << map.policy.epsilon
       << " ref_snr_db=" << map.policy.reference_snr.db() << "\n";
    const Constellation& low = map.low();
    const Constellation& high = map.high();
    for (const auto& region : map.regions) {
        os << "region " << region.region_symbol << " index-symbol="
           << low.labels[region.region_symbol] << " d_self="
           << map.self_distances[region.region_symbol] << "\n";
        for (int j : region.members) {
            os << "  member " << high.labels[j] << " d=" << map.distances[region.region_symbol][j]
               << (map.is_enhanced(region.region_symbol, j) ? " enhanced" : "") << "\n";
        }
    }
    os << "distance-matrix rows=low cols=high\n";
    for (int i = 0; i < map.low_order(); ++i) {
        for (int j = 0; j < map.high_order(); ++j)
            os << (j ? " " : "") << map.distances[i][j];
        os << "\n";
    }
    return os.str();
}

} // namespace punctsim
