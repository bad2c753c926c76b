// punctsim command-line tool: experiment subcommands, validation suite and
// the search microbenchmark. Every subcommand emits CSV with '#' metadata.

#include <CLI11.hpp>

#include <cmath>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "punctsim/analytic.hpp"
#include "punctsim/csv.hpp"
#include "punctsim/kernels.hpp"
#include "punctsim/rng.hpp"
#include "punctsim/simulator.hpp"

using namespace punctsim;

namespace {

constexpr const char* kVersion = "punctsim 0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string out;
    int trials = 1000;
    std::vector<double> power_grid{-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40, 45};
    std::vector<int> k_grid{1, 75, 150, 300, 600, 1200};
    std::string mapper = "urllc";
    std::string pair = "2,2";
    double lambda = 7.0;
    int zeta = 24;
    std::string scheme = "proposed";
    int users = 10;
    int coherence = 14;
    int symbols_per_re = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->set_config("--config");
    cmd->add_option("--seed", o.seed, "RNG seed")->envname("PUNCTSIM_SEED");
    cmd->add_option("--out", o.out, "output CSV path (default stdout)")->envname("PUNCTSIM_OUT");
    cmd->add_option("--trials", o.trials, "simulated sTTIs per point")
        ->envname("PUNCTSIM_TRIALS");
    cmd->add_option("--power-grid", o.power_grid, "transmit power grid in dBm")
        ->delimiter(',')
        ->envname("PUNCTSIM_POWER_GRID");
    cmd->add_option("--k-grid", o.k_grid, "search-space sizes")
        ->delimiter(',')
        ->envname("PUNCTSIM_K_GRID");
    cmd->add_option("--mapper", o.mapper, "urllc | srm | esrm")->envname("PUNCTSIM_MAPPER");
    cmd->add_option("--pair", o.pair, "URLLC,eMBB modulation orders, e.g. 2,16")
        ->envname("PUNCTSIM_PAIR");
    cmd->add_option("--lambda", o.lambda, "URLLC packets per millisecond")
        ->envname("PUNCTSIM_LAMBDA");
    cmd->add_option("--zeta", o.zeta, "URLLC segment size in symbols")->envname("PUNCTSIM_ZETA");
    cmd->add_option("--scheme", o.scheme, "proposed | baseline")->envname("PUNCTSIM_SCHEME");
    cmd->add_option("--users", o.users, "number of eMBB users")->envname("PUNCTSIM_USERS");
    cmd->add_option("--coherence", o.coherence, "fading coherence in sTTIs")
        ->envname("PUNCTSIM_COHERENCE");
    cmd->add_option("--symbols-per-re", o.symbols_per_re, "OFDM symbols per RE per sTTI (1 or 2)")
        ->envname("PUNCTSIM_SYMBOLS_PER_RE");
}

Mapper parse_mapper(const std::string& s) {
    if (s == "urllc") return Mapper::urllc;
    if (s == "srm") return Mapper::srm;
    if (s == "esrm") return Mapper::esrm;
    throw std::invalid_argument("unknown mapper '" + s + "' (urllc | srm | esrm)");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "proposed") return Scheme::proposed;
    if (s == "baseline") return Scheme::baseline;
    throw std::invalid_argument("unknown scheme '" + s + "' (proposed | baseline)");
}

std::pair<int, int> parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("--pair expects n,m (e.g. 2,16)");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

void emit_config(CsvWriter& csv, const CommonOpts& o, const std::string& cmd) {
    csv.meta("tool", kVersion);
    csv.meta("kernel_backend", kernels::active_backend());
    csv.meta("command", cmd);
    csv.meta("seed", o.seed);
    csv.meta("trials", o.trials);
    csv.meta("mapper", o.mapper);
    csv.meta("pair", o.pair);
    csv.meta("lambda", o.lambda);
    csv.meta("zeta", o.zeta);
    csv.meta("scheme", o.scheme);
    csv.meta("users", o.users);
    csv.meta("coherence", o.coherence);
    csv.meta("symbols_per_re", o.symbols_per_re);
    auto join = [](const auto& v) {
        std::string s;
        for (const auto& x : v) {
            if (!s.empty()) s += ",";
            std::ostringstream os;
            os << x;
            s += os.str();
        }
        return s;
    };
    csv.meta("power_grid", join(o.power_grid));
    csv.meta("k_grid", join(o.k_grid));
}

LoadProfile single_pair_profile(int n, int m, double L_m, double l, int zeta, int K,
                                int segments) {
    LoadProfile p;
    p.L = L_m;
    p.mods = {{m, 1.0, {{n, l}}}};
    p.zeta = zeta;
    p.K = K;
    p.segments = segments;
    return p;
}

ExperimentConfig experiment_from(const CommonOpts& o, int n, int m_fixed) {
    ExperimentConfig cfg;
    cfg.scheme = parse_scheme(o.scheme);
    cfg.mapper = parse_mapper(o.mapper);
    cfg.urllc_order = n;
    cfg.embb_order_fixed = m_fixed;
    cfg.traffic.lambda = o.lambda;
    cfg.traffic.zeta = o.zeta;
    cfg.K = o.k_grid.empty() ? 1200 : o.k_grid.back();
    cfg.num_users = o.users;
    cfg.sttis = o.trials;
    cfg.seed = o.seed;
    cfg.coherence_sttis = o.coherence;
    cfg.symbols_per_re = o.symbols_per_re;
    return cfg;
}

// ---- loss-vs-k -------------------------------------------------------------

// Monte Carlo of the Fig.-5 experiment cell: iid candidate blocks, one search,
// mapper applied, punctured symbols pushed through the fading channel.
double empirical_relative_loss(int n, int m, Mapper mapper, int K, int zeta, double L_m,
                               double gamma_bar, Channel channel, int trials,
                               std::uint64_t seed) {
    const SimilarityMap map = build_similarity_map(n, m);
    const Constellation& embb = map.embb;
    const Constellation& urllc = map.urllc;
    std::vector<std::uint8_t> reg_table(m), enh_table(m);
    for (int s = 0; s < m; ++s) {
        const int r = map.urllc_is_low ? map.region_of_high[s] : s;
        reg_table[s] = static_cast<std::uint8_t>(r);
        enh_table[s] = (map.urllc_is_low && map.is_enhanced(r, s))
                           ? static_cast<std::uint8_t>(r)
                           : std::uint8_t(0xFF);
    }
    const auto& table = mapper == Mapper::esrm ? enh_table : reg_table;
    const int N = std::max(1, std::min<int>(K, int(L_m) - zeta + 1));

    RngStream rng(seed, stream_id(streams::oracle, n * 100 + m, K));
    std::uint64_t errors = 0, total = 0;
    std::vector<std::uint16_t> usym(zeta);
    std::vector<std::uint8_t> ureg(zeta);
    std::vector<std::uint16_t> cand(std::size_t(N) * zeta);
    std::vector<std::uint8_t> cand_ids(std::size_t(N) * zeta);
    for (int tr = 0; tr < trials; ++tr) {
        for (int i = 0; i < zeta; ++i) {
            usym[i] = static_cast<std::uint16_t>(rng.next_below(n));
            ureg[i] = static_cast<std::uint8_t>(map.urllc_is_low ? usym[i]
                                                                 : map.region_of_high[usym[i]]);
        }
        for (std::size_t i = 0; i < cand.size(); ++i) {
            cand[i] = static_cast<std::uint16_t>(rng.next_below(m));
            cand_ids[i] = table[cand[i]];
        }
        const SearchResult sr = similarity_search(ureg, cand_ids, N);
        const std::uint16_t* block = cand.data() + std::size_t(sr.selected) * zeta;
        for (int i = 0; i < zeta; ++i) {
            const bool keep = mapper != Mapper::urllc && table[block[i]] == ureg[i];
            const cd x = keep ? embb.points[block[i]] : urllc.points[usym[i]];
            const double t = channel == Channel::rayleigh
                                 ? [&] {
                                       const double g1 = rng.next_gaussian();
                                       const double g2 = rng.next_gaussian();
                                       return 0.5 * (g1 * g1 + g2 * g2);
                                   }()
                                 : 1.0;
            const double sigma = std::sqrt(0.5 / std::max(gamma_bar * t, 1e-300));
            const cd y = x + cd{sigma * rng.next_gaussian(), sigma * rng.next_gaussian()};
            errors += (ml_detect(embb, y) != block[i]);
            ++total;
        }
    }
    return total ? double(errors) / double(total) : 0.0;
}

int cmd_loss_vs_k(const CommonOpts& o, double gamma_db, double L_m) {
    CsvWriter csv(o.out);
    emit_config(csv, o, "loss-vs-k");
    csv.meta("gamma_db", gamma_db);
    csv.meta("L_m", L_m);
    auto [n, m] = parse_pair(o.pair);
    const Mapper mapper = parse_mapper(o.mapper);
    csv.header({"K", "mapper", "pair", "analytic_loss", "empirical_loss", "ci95"});
    const SnrPoint snr = SnrPoint::from_db(gamma_db);
    for (int K : o.k_grid) {
        LoadProfile p = single_pair_profile(n, m, L_m, o.zeta, o.zeta, K, 1);
        const double analytic = embb_loss_relative(p, snr, Channel::rayleigh, mapper);
        const int trials = std::max(200, o.trials);
        const double emp = empirical_relative_loss(n, m, mapper, K, o.zeta, L_m, snr.gamma(),
                                                   Channel::rayleigh, trials, o.seed);
        const double ci = 1.96 * std::sqrt(std::max(emp * (1 - emp), 0.0) /
                                           double(trials) / o.zeta);
        csv.row(K, to_string(mapper), o.pair, analytic, emp, ci);
    }
    return 0;
}

// ---- ser-sweep -------------------------------------------------------------

int cmd_ser_sweep(const CommonOpts& o) {
    CsvWriter csv(o.out);
    emit_config(csv, o, "ser-sweep");
    auto [n, m_fixed] = parse_pair(o.pair);
    const Mapper mapper = parse_mapper(o.mapper);
    csv.header({"power_dbm", "lambda", "analytic_ser", "empirical_ser", "ci95", "high_snr_plateau",
                "match_fraction", "punctured_fraction", "pool_per_segment"});

    // Grid cells are independent; run them concurrently and emit in order.
    std::vector<std::future<SerReport>> cells;
    for (double p_dbm : o.power_grid)
        cells.push_back(std::async(std::launch::async, [&, p_dbm] {
            ExperimentConfig cfg = experiment_from(o, n, m_fixed);
            cfg.power_dbm = p_dbm;
            return run_experiment(cfg);
        }));

    for (std::size_t i = 0; i < o.power_grid.size(); ++i) {
        const double p_dbm = o.power_grid[i];
        ExperimentConfig cfg = experiment_from(o, n, m_fixed);
        cfg.power_dbm = p_dbm;
        const SerReport rep = cells[i].get();

        // Analytic counterpart averaged over the users' mean SNRs.
        const int S = cfg.L * cfg.symbols_per_re;
        const double l_per_user =
            cfg.traffic.lambda * cfg.traffic.stti_ms * 96.0 / cfg.num_users;
        const int Z = 96 / cfg.traffic.zeta;
        double analytic = 0.0, plateau = 0.0;
        ExperimentConfig resolved = cfg;
        if (resolved.user_distance.empty())
            resolved.user_distance = default_user_ring(cfg.num_users);
        for (int u = 0; u < cfg.num_users; ++u) {
            const double gbar = mean_snr(resolved, resolved.user_distance[u]);
            const int m_u = rep.user_modulation[u];
            LoadProfile prof = single_pair_profile(n, m_u, double(S) / cfg.num_users, l_per_user,
                                                   cfg.traffic.zeta, cfg.K, Z);
            // Realised per-segment pool from the placement geometry.
            const double windows = double(cfg.lookahead_sttis) * S / cfg.traffic.zeta;
            prof.K = std::min<int>(cfg.K, int(windows));
            analytic += embb_ser(prof, SnrPoint(gbar), cfg.channel, mapper) / cfg.num_users;
            plateau += embb_ser_high_snr(prof, mapper) / cfg.num_users;
        }
        csv.row(p_dbm, o.lambda, analytic, rep.embb_ser, rep.embb_ci_halfwidth, plateau,
                rep.match_fraction, rep.punctured_fraction, rep.mean_pool_size);
    }
    return 0;
}

// ---- reliability -----------------------------------------------------------

int cmd_reliability(const CommonOpts& o, double power_dbm, double target) {
    CsvWriter csv(o.out);
    emit_config(csv, o, "reliability");
    csv.meta("power_dbm", power_dbm);
    csv.meta("target_ser", target);
    auto [n, m_fixed] = parse_pair(o.pair);
    csv.header({"scheme", "target", "reliability", "user", "user_reliability"});
    for (Scheme scheme : {Scheme::proposed, Scheme::baseline}) {
        ExperimentConfig cfg = experiment_from(o, n, m_fixed);
        cfg.scheme = scheme;
        cfg.power_dbm = power_dbm;
        cfg.reliability_target = target;
        const SerReport rep = run_experiment(cfg);
        csv.row(to_string(scheme), target, rep.reliability, -1, rep.reliability);
        for (int u = 0; u < cfg.num_users; ++u)
            csv.row(to_string(scheme), target, rep.reliability, u,
                    rep.per_user_reliability[u]);
    }
    return 0;
}

// ---- urllc -----------------------------------------------------------------

int cmd_urllc(const CommonOpts& o) {
    CsvWriter csv(o.out);
    emit_config(csv, o, "urllc");
    auto [n, m_fixed] = parse_pair(o.pair);
    const Mapper mapper = parse_mapper(o.mapper);
    if (m_fixed == 0 && mapper != Mapper::urllc)
        throw std::invalid_argument("urllc: SRM/ESRM analysis needs a fixed pair, e.g. --pair 2,4");
    csv.header({"power_dbm", "analytic_ser", "channel_only", "empirical_ser", "ci95",
                "power_loss_db"});
    const double w_db = urllc_power_loss_db(n, std::max(m_fixed, n), mapper);
    for (double p_dbm : o.power_grid) {
        ExperimentConfig cfg = experiment_from(o, n, m_fixed);
        cfg.power_dbm = p_dbm;
        cfg.measure_urllc = true;
        const SerReport rep = run_experiment(cfg);
        const double gu = mean_snr(cfg, cfg.urllc_distance);
        const double analytic =
            urllc_ser(n, std::max(m_fixed, n), SnrPoint(gu), cfg.channel, mapper,
                      rep.match_fraction > 0 ? rep.match_fraction : -1.0);
        const double channel_only = channel_ser(n, SnrPoint(gu), cfg.channel);
        csv.row(p_dbm, analytic, channel_only, rep.urllc_ser, rep.urllc_ci_halfwidth, w_db);
    }
    return 0;
}

// ---- bench -----------------------------------------------------------------

int cmd_bench(const CommonOpts& o, int repetitions) {
    CsvWriter csv(o.out);
    emit_config(csv, o, "bench");
    std::vector<int> grid;
    for (int k : o.k_grid)
        if (k > 1) grid.push_back(k);
    if (grid.empty()) grid = {75, 150, 300, 600, 1200};
    const BenchmarkResult res = benchmark_search(grid, o.zeta, repetitions, o.seed);
    csv.header({"K", "median_us", "p99_us", "fit_slope_us_per_k", "r2"});
    for (const auto& row : res.rows)
        csv.row(row.K, row.median_us, row.p99_us, res.fit_slope_us_per_k, res.r_squared);
    return 0;
}

// ---- validate --------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass;
    double value;
    double expected;
    double tolerance;
};

int cmd_validate(const CommonOpts& o) {
    std::vector<CheckResult> checks;
    auto check = [&](const std::string& name, double value, double expected, double tol) {
        checks.push_back({name, std::abs(value - expected) <= tol, value, expected, tol});
    };
    auto check_rel = [&](const std::string& name, double value, double expected, double rel) {
        checks.push_back(
            {name, std::abs(value - expected) <= rel * std::abs(expected), value, expected, rel});
    };

    // Similarity identities (exact).
    for (int m : {2, 4, 16, 64})
        check("eta(2," + std::to_string(m) + ")=0.5", eta_uniform(build_similarity_map(2, m)),
              0.5, 1e-12);
    check("eta(4,4)=0.25", eta_uniform(build_similarity_map(4, 4)), 0.25, 1e-12);

    // Order-statistics expectation against the search max-count oracle.
    {
        const int zeta = 8, Lm = 200, N = Lm - zeta;
        RngStream rng(o.seed, stream_id(streams::oracle, 42, 0));
        double acc = 0.0;
        std::vector<std::uint8_t> u(zeta), cand(std::size_t(N) * zeta);
        const int trials = 20000;
        for (int t = 0; t < trials; ++t) {
            for (auto& b : u) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
            for (auto& b : cand) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
            acc += similarity_search(u, cand, N).count;
        }
        check_rel("expected similarity(8,0.5,200) vs search oracle", acc / trials,
                  expected_similarity(zeta, zeta, Lm, 0.5), 0.03);
    }

    // Equivalent power loss for SRM(2,4).
    check("power loss srm(2,4) dB", std::abs(urllc_power_loss_db(2, 4, Mapper::srm)), 2.5, 0.3);

    // Channel SER vs Monte Carlo (pinned seeds).
    {
        auto mc_ser = [&](int order, double gamma, Channel ch, int trials) {
            const Constellation c = build_constellation(order);
            RngStream rng(o.seed, stream_id(streams::oracle, order, unsigned(ch)));
            std::uint64_t err = 0;
            for (int t = 0; t < trials; ++t) {
                const int s = static_cast<int>(rng.next_below(order));
                double fade = 1.0;
                if (ch == Channel::rayleigh) {
                    const double g1 = rng.next_gaussian(), g2 = rng.next_gaussian();
                    fade = 0.5 * (g1 * g1 + g2 * g2);
                }
                const double sigma = std::sqrt(0.5 / std::max(gamma * fade, 1e-300));
                const cd y = c.points[s] +
                             cd{sigma * rng.next_gaussian(), sigma * rng.next_gaussian()};
                err += (ml_detect(c, y) != s);
            }
            return double(err) / trials;
        };
        check_rel("channel ser awgn 4-QAM @10dB vs MC",
                  channel_ser_awgn(4, SnrPoint::from_db(10)),
                  mc_ser(4, std::pow(10.0, 1.0), Channel::awgn, 2000000), 0.05);
        check_rel("channel ser rayleigh 4-QAM @20dB vs MC",
                  channel_ser_rayleigh(4, SnrPoint::from_db(20)),
                  mc_ser(4, 100.0, Channel::rayleigh, 2000000), 0.05);
    }

    // ML detection against an exhaustive scan.
    {
        const Constellation c = build_constellation(16);
        RngStream rng(o.seed, stream_id(streams::oracle, 16, 99));
        int mismatches = 0;
        for (int t = 0; t < 20000; ++t) {
            const cd s{3.0 * (rng.next_double() - 0.5), 3.0 * (rng.next_double() - 0.5)};
            int best = 0;
            double bd = 1e300;
            for (int k = 0; k < 16; ++k) {
                const double d = std::norm(s - c.points[k]);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            mismatches += (ml_detect(c, s) != best);
        }
        check("ml_detect vs exhaustive scan (mismatches)", mismatches, 0, 0.5);
    }

    // Boundary distances against plane geometry (BPSK boundary = Im axis).
    {
        const SimilarityMap map = build_similarity_map(2, 16);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 16; ++j)
                worst = std::max(worst, std::abs(boundary_distance(map, i, j) -
                                                 std::abs(map.embb.points[j].real())));
        check("boundary distances (2,16) vs |Re|", worst, 0.0, 1e-12);
    }

    // SER of effectively punctured symbols (2,4) vs cross-region Monte Carlo,
    // at low SNR so the value sits visibly below the ~1 saturation.
    {
        const SimilarityMap map = build_similarity_map(2, 4);
        const double gamma = SnrPoint::from_db(0).gamma();
        RngStream rng(o.seed, stream_id(streams::oracle, 24, 7));
        std::uint64_t err = 0;
        const int trials = 400000;
        for (int t = 0; t < trials; ++t) {
            const int u = static_cast<int>(rng.next_below(2));
            int e;
            do {
                e = static_cast<int>(rng.next_below(4));
            } while (map.region_of_high[e] == u);
            const double sigma = std::sqrt(0.5 / gamma);
            const cd y = map.urllc.points[u] +
                         cd{sigma * rng.next_gaussian(), sigma * rng.next_gaussian()};
            err += (ml_detect(map.embb, y) != e);
        }
        check_rel("effective-puncture ser (2,4) @0dB vs MC",
                  ser_effective(2, 4, SnrPoint::from_db(0), Channel::awgn).exact,
                  double(err) / trials, 0.05);
    }

    // SER of non-effectively punctured symbols (4,2) vs in-region Monte Carlo.
    {
        const SimilarityMap map = build_similarity_map(4, 2);
        const double gamma = SnrPoint::from_db(10).gamma();
        RngStream rng(o.seed, stream_id(streams::oracle, 42, 7));
        std::uint64_t err = 0;
        const int trials = 1000000;
        for (int t = 0; t < trials; ++t) {
            const int u = static_cast<int>(rng.next_below(4));
            const double sigma = std::sqrt(0.5 / gamma);
            const cd y = map.urllc.points[u] +
                         cd{sigma * rng.next_gaussian(), sigma * rng.next_gaussian()};
            err += ((y.real() >= 0 ? 0 : 1) != map.region_of_high[u]);
        }
        check_rel("in-region puncture ser (4,2) @10dB vs MC",
                  ser_non_effective(4, 2, SnrPoint::from_db(10), Channel::awgn, Mapper::urllc),
                  double(err) / trials, 0.05);
    }

    // URLLC SER under ESRM (2,16) vs the substitution Monte Carlo.
    {
        const SimilarityMap map = build_similarity_map(2, 16);
        const double gamma = SnrPoint::from_db(12).gamma();
        const double q = default_substitution_prob(2, 16, Mapper::esrm);
        RngStream rng(o.seed, stream_id(streams::oracle, 216, 7));
        std::uint64_t err = 0;
        const int trials = 400000;
        for (int t = 0; t < trials; ++t) {
            const int u = static_cast<int>(rng.next_below(2));
            cd x = map.urllc.points[u];
            if (rng.next_double() < q) {
                const auto& enh = map.regions[u].enhanced;
                x = map.embb.points[enh[rng.next_below(enh.size())]];
            }
            const double g1 = rng.next_gaussian(), g2 = rng.next_gaussian();
            const double fade = 0.5 * (g1 * g1 + g2 * g2);
            const double sigma = std::sqrt(0.5 / std::max(gamma * fade, 1e-300));
            const cd y = x + cd{sigma * rng.next_gaussian(), sigma * rng.next_gaussian()};
            err += ((y.real() >= 0 ? 0 : 1) != u);
        }
        check_rel("urllc ser (2,16) esrm @12dB rayleigh vs MC",
                  urllc_ser(2, 16, SnrPoint::from_db(12), Channel::rayleigh, Mapper::esrm),
                  double(err) / trials, 0.05);
    }

    // Exact identities.
    check("rayleigh zero-SNR 16-QAM", channel_ser_rayleigh(16, SnrPoint(0.0)), 1.0 - 1.0 / 16,
          1e-12);
    {
        LoadProfile p = single_pair_profile(2, 2, 1200, 96, 24, 1, 1);
        const SnrPoint g = SnrPoint::from_db(20);
        const double no_sim = embb_ser_no_similarity(p, g, Channel::rayleigh);
        const double chan = channel_ser(2, g, Channel::rayleigh);
        const double two_term = chan * (1 - 96.0 / 1200) +
                           ser_effective(2, 2, g, Channel::rayleigh).exact * 96.0 / 1200;
        check("zero-similarity degeneracy", no_sim, two_term, 1e-15);
    }

    CsvWriter csv(o.out);
    emit_config(csv, o, "validate");
    csv.header({"check", "status", "value", "expected", "tolerance"});
    bool all = true;
    for (const auto& c : checks) {
        csv.row(c.name, c.pass ? "PASS" : "FAIL", c.value, c.expected, c.tolerance);
        all = all && c.pass;
    }
    return all ? 0 : kExitValidation;
}

// ---- dump-map --------------------------------------------------------------

int cmd_dump_map(const CommonOpts& o) {
    auto [n, m] = parse_pair(o.pair);
    std::cout << dump(build_similarity_map(n, m));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity-aware URLLC/eMBB puncturing link simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts o;
    double gamma_db = 40.0;
    double L_m = 1200.0;
    double power_dbm = 10.0;
    double target = 0.01;
    int repetitions = 300;

    auto* loss = app.add_subcommand("loss-vs-k", "average eMBB loss per punctured symbol vs K");
    add_common(loss, o);
    loss->add_option("--gamma-db", gamma_db, "operating eMBB SNR in dB");
    loss->add_option("--lm", L_m, "eMBB symbols per slot");

    auto* sweep = app.add_subcommand("ser-sweep", "eMBB SER vs transmit power");
    add_common(sweep, o);

    auto* rel = app.add_subcommand("reliability", "block reliability, proposed vs baseline");
    add_common(rel, o);
    rel->add_option("--power-dbm", power_dbm, "transmit power");
    rel->add_option("--target", target, "target block SER");

    auto* url = app.add_subcommand("urllc", "URLLC SER vs transmit power");
    add_common(url, o);

    auto* val = app.add_subcommand("validate", "analytic vs Monte Carlo oracle suite");
    add_common(val, o);

    auto* ben = app.add_subcommand("bench", "similarity-search timing vs K");
    add_common(ben, o);
    ben->add_option("--repetitions", repetitions, "measurements per K");

    auto* dmp = app.add_subcommand("dump-map", "print a similarity map as text");
    add_common(dmp, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help / --version
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (loss->parsed()) return cmd_loss_vs_k(o, gamma_db, L_m);
        if (sweep->parsed()) return cmd_ser_sweep(o);
        if (rel->parsed()) return cmd_reliability(o, power_dbm, target);
        if (url->parsed()) return cmd_urllc(o);
        if (val->parsed()) return cmd_validate(o);
        if (ben->parsed()) return cmd_bench(o, repetitions);
        if (dmp->parsed()) return cmd_dump_map(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
