#include "punctsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace punctsim {

namespace {

// Similarity maps are immutable; cache them per (n, m) under the default policy.
const SimilarityMap& cached_map(int n, int m) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, SimilarityMap> cache;
    std::scoped_lock lock(mu);
    auto key = std::make_pair(n, m);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_similarity_map(n, m)).first;
    return it->second;
}

// P(eMBB receiver does not decode symbol e | point sent) at linear SNR gamma.
double pair_error_awgn(const Constellation& embb, int e, cd sent, double gamma) {
    return 1.0 - cell_probability(embb, e, sent, gamma);
}

double pair_error(const Constellation& embb, int e, cd sent, double gamma, Channel channel) {
    if (channel == Channel::awgn) return pair_error_awgn(embb, e, sent, gamma);
    return rayleigh_average(gamma, [&](double g) { return pair_error_awgn(embb, e, sent, g); });
}

struct Pair {
    cd urllc_point; // what the BS transmits in place of the eMBB symbol
    int embb_symbol;
    double d;       // boundary distance for the min-distance forms
    double d_self;
};

// Uniform-prior pair sets. The URLLC point and the punctured eMBB symbol are
// drawn independently and uniformly; conditioning on the similarity class
// keeps the distribution uniform within the class.
std::vector<Pair> in_region_pairs(const SimilarityMap& map) {
    std::vector<Pair> pairs;
    if (map.urllc_is_low) {
        for (const auto& r : map.regions)
            for (int j : r.members)
                pairs.push_back({map.urllc.points[r.region_symbol], j,
                                 map.distances[r.region_symbol][j],
                                 map.self_distances[r.region_symbol]});
    } else {
        for (const auto& r : map.regions)
            for (int j : r.members)
                pairs.push_back({map.urllc.points[j], r.region_symbol,
                                 map.distances[r.region_symbol][j],
                                 map.self_distances[r.region_symbol]});
    }
    return pairs;
}

std::vector<Pair> cross_region_pairs(const SimilarityMap& map) {
    std::vector<Pair> pairs;
    const int nu = map.n, ne = map.m;
    for (int u = 0; u < nu; ++u) {
        const int ru = map.urllc_is_low ? u : map.region_of_high[u];
        for (int e = 0; e < ne; ++e) {
            const int re = map.urllc_is_low ? map.region_of_high[e] : e;
            if (ru != re) pairs.push_back({map.urllc.points[u], e, 0.0, 0.0});
        }
    }
    return pairs;
}

// ESRM leftovers: same-region non-enhanced plus cross-region pairs.
std::vector<Pair> non_substituted_pairs_esrm(const SimilarityMap& map) {
    std::vector<Pair> pairs = cross_region_pairs(map);
    for (const auto& r : map.regions)
        for (int j : r.members)
            if (!map.is_enhanced(r.region_symbol, j))
                pairs.push_back({map.urllc.points[r.region_symbol], j,
                                 map.distances[r.region_symbol][j],
                                 map.self_distances[r.region_symbol]});
    return pairs;
}

std::vector<Pair> substituted_pairs(const SimilarityMap& map, Mapper mapper) {
    if (mapper == Mapper::srm) return in_region_pairs(map);
    std::vector<Pair> pairs;
    for (const auto& r : map.regions)
        for (int j : r.enhanced)
            pairs.push_back({map.urllc.points[r.region_symbol], j,
                             map.distances[r.region_symbol][j],
                             map.self_distances[r.region_symbol]});
    return pairs;
}

double mean_pair_error(const std::vector<Pair>& pairs, const Constellation& embb, double gamma,
                       Channel channel) {
    double acc = 0.0;
    for (const auto& p : pairs) acc += pair_error(embb, p.embb_symbol, p.urllc_point, gamma, channel);
    return acc / static_cast<double>(pairs.size());
}

void require_mapper_orders(int n, int m, Mapper mapper) {
    if ((mapper == Mapper::srm || mapper == Mapper::esrm) && n > m)
        throw std::invalid_argument("SRM/ESRM require URLLC order <= eMBB order");
}

double policy_eta(const SimilarityMap& map, Mapper mapper) {
    return mapper == Mapper::esrm ? eta_enhanced_uniform(map) : eta_uniform(map);
}

} // namespace

double ModLoad::l_total() const {
    double s = 0.0;
    for (const auto& [n, l] : l_nm) s += l;
    return s;
}

void LoadProfile::validate() const {
    if (L <= 0 || zeta < 1 || K < 1 || segments < 1)
        throw std::invalid_argument("LoadProfile: L, zeta, K, segments must be positive");
    if (mods.empty()) throw std::invalid_argument("LoadProfile: no modulation entries");
    double psum = 0.0;
    for (const auto& e : mods) {
        require_order(e.m);
        psum += e.p_m;
        const double lm = L_m(e);
        if (e.l_total() > lm + 1e-9)
            throw std::invalid_argument("LoadProfile: punctured symbols exceed L_m");
        for (const auto& [n, l] : e.l_nm) {
            require_order(n);
            if (l < 0) throw std::invalid_argument("LoadProfile: negative l_nm");
            if (l > 0 && zeta > lm)
                throw std::invalid_argument("LoadProfile: zeta exceeds punctured L_m");
        }
    }
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("LoadProfile: p_m must sum to 1");
}

double binomial_cdf(int k, int n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double lc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        acc += std::exp(lc + j * lp + (n - j) * lq);
    }
    return std::min(acc, 1.0);
}

double expected_similarity_max(int zeta, double eta, double candidates) {
    if (zeta < 1) throw std::invalid_argument("expected_similarity_max: zeta < 1");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("expected_similarity_max: eta outside [0,1]");
    if (candidates <= 1.0) return zeta * eta;
    double u = 0.0;
    for (int k = 0; k < zeta; ++k) {
        const double F = binomial_cdf(k, zeta, eta);
        // F^candidates via exp(candidates * log F) to dodge underflow.
        const double pw = F <= 0.0 ? 0.0 : std::exp(candidates * std::log(F));
        u += 1.0 - pw;
    }
    return u;
}

double expected_similarity(int zeta, double l_nm, double L_m, double eta) {
    if (zeta < 1 || L_m < zeta)
        throw std::invalid_argument("expected_similarity: requires 1 <= zeta <= L_m");
    if (l_nm < 0) throw std::invalid_argument("expected_similarity: negative l_nm");
    if (L_m == zeta) return zeta * eta; // no search freedom
    // The inner sum is identical for every zeta-block of l_nm, so the
    // block average collapses to the single-block value.
    return expected_similarity_max(zeta, eta, L_m - zeta);
}

PuncturedSplit effective_punctured(int zeta, double l_nm, double L_m, double eta) {
    const double u = expected_similarity(zeta, l_nm, L_m, eta);
    const double eff = (1.0 - u / zeta) * l_nm;
    return {eff, l_nm - eff};
}

double search_candidates(const LoadProfile& profile, double L_m) {
    const double window_count = std::max(1.0, L_m - profile.zeta + 1.0);
    const double pool = std::min(static_cast<double>(profile.K), window_count);
    return std::max(1.0, pool / profile.segments);
}

double match_probability(const SimilarityMap& map, Mapper mapper, int zeta, double candidates) {
    const double e = policy_eta(map, mapper);
    return expected_similarity_max(zeta, e, candidates) / zeta;
}

EffectiveSer ser_effective(int n, int m, SnrPoint snr, Channel channel) {
    require_order(n);
    require_order(m);
    const SimilarityMap& map = cached_map(n, m);
    const auto pairs = cross_region_pairs(map);
    EffectiveSer out;
    out.exact = pairs.empty() ? 0.0 : mean_pair_error(pairs, map.embb, snr.gamma(), channel);
    out.bound = 1.0 - channel_ser(n, snr, channel) / (m - 1.0);
    return out;
}

double ser_non_effective(int n, int m, SnrPoint snr, Channel channel, Mapper mapper) {
    require_order(n);
    require_order(m);
    require_mapper_orders(n, m, mapper);
    if (n == m) return channel_ser(m, snr, channel);
    if (n < m && mapper != Mapper::urllc) return channel_ser(m, snr, channel);
    const SimilarityMap& map = cached_map(n, m);
    return mean_pair_error(in_region_pairs(map), map.embb, snr.gamma(), channel);
}

double ser_non_effective_min_distance(int n, int m, SnrPoint snr, Channel channel) {
    require_order(n);
    require_order(m);
    const SimilarityMap& map = cached_map(n, m);
    double acc = 0.0;
    const auto pairs = in_region_pairs(map);
    for (const auto& p : pairs)
        acc += channel_ser(m, SnrPoint(snr.gamma() * p.d * p.d), channel);
    return acc / static_cast<double>(pairs.size());
}

double ser_modified_esrm(int n, int m, SnrPoint snr, Channel channel) {
    require_order(n);
    require_order(m);
    require_mapper_orders(n, m, Mapper::esrm);
    const SimilarityMap& map = cached_map(n, m);
    const auto pairs = non_substituted_pairs_esrm(map);
    if (pairs.empty()) return 0.0;
    return mean_pair_error(pairs, map.embb, snr.gamma(), channel);
}

namespace {

struct PunctureClassSer {
    double matched;   // error probability of the mapper's similarity class
    double unmatched; // error probability of the remaining punctured symbols
};

PunctureClassSer puncture_class_ser(int n, int m, SnrPoint snr, Channel channel, Mapper mapper) {
    PunctureClassSer c{};
    switch (mapper) {
        case Mapper::urllc:
            c.matched = ser_non_effective(n, m, snr, channel, Mapper::urllc);
            c.unmatched = ser_effective(n, m, snr, channel).exact;
            break;
        case Mapper::srm:
            c.matched = channel_ser(m, snr, channel);
            c.unmatched = ser_effective(n, m, snr, channel).exact;
            break;
        case Mapper::esrm:
            c.matched = channel_ser(m, snr, channel);
            c.unmatched = ser_modified_esrm(n, m, snr, channel);
            break;
    }
    return c;
}

} // namespace

double embb_ser(const LoadProfile& profile, SnrPoint snr, Channel channel, Mapper mapper) {
    profile.validate();
    double total = 0.0;
    for (const auto& e : profile.mods) {
        const double lm = profile.L_m(e);
        double term = channel_ser(e.m, snr, channel) * (1.0 - e.l_total() / lm);
        for (const auto& [n, l] : e.l_nm) {
            if (l <= 0) continue;
            require_mapper_orders(n, e.m, mapper);
            const SimilarityMap& map = cached_map(n, e.m);
            const double q =
                match_probability(map, mapper, profile.zeta, search_candidates(profile, lm));
            const auto cls = puncture_class_ser(n, e.m, snr, channel, mapper);
            term += (l / lm) * (q * cls.matched + (1.0 - q) * cls.unmatched);
        }
        total += e.p_m * term;
    }
    return total;
}

double embb_ser_no_similarity(const LoadProfile& profile, SnrPoint snr, Channel channel) {
    profile.validate();
    double total = 0.0;
    for (const auto& e : profile.mods) {
        const double lm = profile.L_m(e);
        double term = channel_ser(e.m, snr, channel) * (1.0 - e.l_total() / lm);
        for (const auto& [n, l] : e.l_nm) {
            if (l <= 0) continue;
            term += (l / lm) * ser_effective(n, e.m, snr, channel).exact;
        }
        total += e.p_m * term;
    }
    return total;
}

double embb_ser_high_snr(const LoadProfile& profile, Mapper mapper) {
    profile.validate();
    double total = 0.0;
    for (const auto& e : profile.mods) {
        const double lm = profile.L_m(e);
        double term = 0.0;
        for (const auto& [n, l] : e.l_nm) {
            if (l <= 0) continue;
            require_mapper_orders(n, e.m, mapper);
            const SimilarityMap& map = cached_map(n, e.m);
            const double q =
                match_probability(map, mapper, profile.zeta, search_candidates(profile, lm));
            term += (1.0 - q) * l / lm;
        }
        total += e.p_m * term;
    }
    return total;
}

double embb_ser_high_similarity(const LoadProfile& profile, SnrPoint snr, Channel channel,
                                Mapper mapper) {
    profile.validate();
    double total = 0.0;
    for (const auto& e : profile.mods) {
        const double lm = profile.L_m(e);
        double term = channel_ser(e.m, snr, channel) * (1.0 - e.l_total() / lm);
        for (const auto& [n, l] : e.l_nm) {
            if (l <= 0) continue;
            const auto cls = puncture_class_ser(n, e.m, snr, channel, mapper);
            term += (l / lm) * cls.matched;
        }
        total += e.p_m * term;
    }
    return total;
}

double default_substitution_prob(int n, int m, Mapper mapper, int zeta, double L_m) {
    const SimilarityMap& map = cached_map(n, m);
    return match_probability(map, mapper, zeta, L_m - zeta);
}

double urllc_ser(int n, int m, SnrPoint snr_u, Channel channel, Mapper mapper,
                 double substitution_prob) {
    require_order(n);
    require_order(m);
    require_mapper_orders(n, m, mapper);
    const double pn = channel_ser(n, snr_u, channel);
    if (mapper == Mapper::urllc) return pn;
    const double q = substitution_prob >= 0.0 ? substitution_prob
                                              : default_substitution_prob(n, m, mapper);
    const SimilarityMap& map = cached_map(n, m);
    const auto pairs = substituted_pairs(map, mapper);
    if (pairs.empty()) return pn;
    double sub = 0.0;
    for (const auto& p : pairs)
        sub += channel_ser(n, SnrPoint(snr_u.gamma() * p.d * p.d), channel);
    sub /= static_cast<double>(pairs.size());
    return (1.0 - q) * pn + q * sub;
}

double urllc_power_loss_db(int n, int m, Mapper mapper, double substitution_prob) {
    require_order(n);
    require_order(m);
    require_mapper_orders(n, m, mapper);
    if (mapper == Mapper::urllc) return 0.0;
    const double q = substitution_prob >= 0.0 ? substitution_prob
                                              : default_substitution_prob(n, m, mapper);
    const SimilarityMap& map = cached_map(n, m);
    const auto pairs = substituted_pairs(map, mapper);
    if (pairs.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& p : pairs) acc += std::log10((p.d * p.d) / (p.d_self * p.d_self));
    return 10.0 * q * acc / static_cast<double>(pairs.size());
}

double embb_loss(const LoadProfile& profile, SnrPoint snr, Channel channel, Mapper mapper,
                 LossModel model) {
    profile.validate();
    double total = 0.0;
    for (const auto& e : profile.mods) {
        const double lm = profile.L_m(e);
        double term = 0.0;
        for (const auto& [n, l] : e.l_nm) {
            if (l <= 0) continue;
            if (model == LossModel::linear) {
                term += l / lm;
                continue;
            }
            require_mapper_orders(n, e.m, mapper);
            const SimilarityMap& map = cached_map(n, e.m);
            const double q =
                match_probability(map, mapper, profile.zeta, search_candidates(profile, lm));
            const auto cls = puncture_class_ser(n, e.m, snr, channel, mapper);
            term += (q * cls.matched + (1.0 - q) * cls.unmatched) * l / lm;
        }
        total += e.p_m * term;
    }
    return total;
}

double embb_loss_relative(const LoadProfile& profile, SnrPoint snr, Channel channel,
                          Mapper mapper) {
    const double lin = embb_loss(profile, snr, channel, mapper, LossModel::linear);
    if (lin <= 0.0) return 0.0;
    return embb_loss(profile, snr, channel, mapper, LossModel::generalized) / lin;
}

double reliability(std::span<const double> block_ser_samples, double target) {
    if (block_ser_samples.empty())
        throw std::invalid_argument("reliability: empty sample set");
    if (target < 0.0 || target > 1.0)
        throw std::invalid_argument("reliability: target outside [0,1]");
    std::size_t ok = 0;
    for (double s : block_ser_samples) ok += (s <= target);
    return static_cast<double>(ok) / static_cast<double>(block_ser_samples.size());
}

} // namespace punctsim
