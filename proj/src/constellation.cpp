#include "punctsim/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "punctsim/kernels.hpp"

namespace punctsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reflected-binary Gray code of k.
unsigned gray(unsigned k) { return k ^ (k >> 1); }

std::string bits_of(unsigned v, int nbits) {
    std::string s(nbits, '0');
    for (int i = 0; i < nbits; ++i)
        if (v & (1u << (nbits - 1 - i))) s[i] = '1';
    return s;
}

// 64-point Gauss-Legendre nodes/weights on [0,1], computed once by Newton
// iteration on P_n.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double p0, p1;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double step = p1 / dp;
                t -= step;
                if (std::abs(step) < 1e-15) break;
            }
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = 0.5 * (1.0 + t);
            w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GaussLegendre& gl16() {
    static const GaussLegendre g(16);
    return g;
}

} // namespace

double DecisionCell::boundary_distance(cd p) const {
    const double x = p.real(), y = p.imag();
    if (!contains(p)) {
        const double cx = std::clamp(x, xlo, xhi);
        const double cy = std::clamp(y, ylo, yhi);
        return std::hypot(x - cx, y - cy);
    }
    double d = kInf;
    if (std::isfinite(xlo)) d = std::min(d, x - xlo);
    if (std::isfinite(xhi)) d = std::min(d, xhi - x);
    if (std::isfinite(ylo)) d = std::min(d, y - ylo);
    if (std::isfinite(yhi)) d = std::min(d, yhi - y);
    return d;
}

int Constellation::bits_per_symbol() const {
    int b = 0;
    while ((1 << b) < order) ++b;
    return b;
}

double Constellation::average_energy() const {
    double e = 0.0;
    for (cd p : points) e += std::norm(p);
    return e / static_cast<double>(points.size());
}

Constellation build_constellation(int order) {
    require_order(order);
    Constellation c;
    c.order = order;

    if (order == 2) {
        c.points = {cd{1.0, 0.0}, cd{-1.0, 0.0}};
        c.labels = {"0", "1"};
        c.min_distance = 2.0;
        c.axis_levels = {-1.0, 1.0};
        c.cells = {{0.0, kInf, -kInf, kInf}, {-kInf, 0.0, -kInf, kInf}};
        return c;
    }

    // Square QAM: sqrt(order) PAM levels per axis, Gray-labelled so the
    // all-zero prefix sits on the positive side (the I-axis MSB selects the
    // half-plane, matching BPSK label 0 <-> +1).
    const int levels = static_cast<int>(std::lround(std::sqrt(double(order))));
    const int axis_bits = c.bits_per_symbol() / 2;
    const double scale = std::sqrt(3.0 / (2.0 * (order - 1)));
    std::vector<double> amp(levels);
    for (int k = 0; k < levels; ++k) amp[k] = (levels - 1 - 2 * k) * scale; // +max .. -max

    c.points.resize(order);
    c.labels.resize(order);
    for (int i = 0; i < levels; ++i) {
        for (int q = 0; q < levels; ++q) {
            const int idx = i * levels + q;
            c.points[idx] = cd{amp[i], amp[q]};
            c.labels[idx] = bits_of(gray(unsigned(i)), axis_bits) +
                            bits_of(gray(unsigned(q)), axis_bits);
        }
    }
    c.min_distance = 2.0 * scale;
    c.axis_levels.resize(levels);
    for (int k = 0; k < levels; ++k) c.axis_levels[k] = amp[levels - 1 - k]; // ascending

    auto axis_cell = [&](double a) {
        // Midpoint thresholds between adjacent amplitudes.
        double lo = -kInf, hi = kInf;
        for (std::size_t k = 0; k + 1 < c.axis_levels.size(); ++k) {
            const double mid = 0.5 * (c.axis_levels[k] + c.axis_levels[k + 1]);
            if (a > mid) lo = std::max(lo, mid);
            if (a < mid) hi = std::min(hi, mid);
        }
        return std::pair{lo, hi};
    };
    c.cells.resize(order);
    for (int idx = 0; idx < order; ++idx) {
        auto [xlo, xhi] = axis_cell(c.points[idx].real());
        auto [ylo, yhi] = axis_cell(c.points[idx].imag());
        c.cells[idx] = {xlo, xhi, ylo, yhi};
    }
    return c;
}

int ml_detect(const Constellation& c, cd sample) {
    if (!std::isfinite(sample.real()) || !std::isfinite(sample.imag()))
        throw std::invalid_argument("ml_detect: non-finite sample");
    int best = 0;
    double bd = kInf;
    for (int i = 0; i < c.order; ++i) {
        const double dx = sample.real() - c.points[i].real();
        const double dy = sample.imag() - c.points[i].imag();
        const double d = dx * dx + dy * dy;
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

void ml_detect_batch(const Constellation& c, std::span<const cd> samples,
                     std::span<std::uint16_t> out) {
    const std::size_t n = samples.size();
    std::vector<double> re(n), im(n), pr(c.order), pi(c.order);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = samples[i].real();
        im[i] = samples[i].imag();
    }
    for (int p = 0; p < c.order; ++p) {
        pr[p] = c.points[p].real();
        pi[p] = c.points[p].imag();
    }
    kernels::detect_batch(re.data(), im.data(), n, pr.data(), pi.data(), c.order, out.data());
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_interval_probability(double lo, double hi, double mu, double sigma) {
    // Difference of upper tails keeps precision far out in either tail.
    auto tail = [&](double t) {
        if (t == kInf) return 0.0;
        if (t == -kInf) return 1.0;
        return q_function((t - mu) / sigma);
    };
    return std::max(0.0, tail(lo) - tail(hi));
}

double cell_probability(const Constellation& c, int idx, cd sent, double gamma) {
    const DecisionCell& cell = c.cells[idx];
    const double sigma = std::sqrt(0.5 / gamma); // N0 = 1/gamma, per-axis N0/2
    return normal_interval_probability(cell.xlo, cell.xhi, sent.real(), sigma) *
           normal_interval_probability(cell.ylo, cell.yhi, sent.imag(), sigma);
}

double channel_ser_awgn(int order, SnrPoint snr) {
    require_order(order);
    const double g = snr.gamma();
    if (order == 2) return q_function(std::sqrt(2.0 * g));
    const double a = 1.0 - 1.0 / std::sqrt(double(order));
    const double v = 4.0 * a * q_function(std::sqrt(3.0 * g / (order - 1)));
    return std::clamp(v, 0.0, 1.0);
}

double channel_ser_awgn_exact(int order, SnrPoint snr) {
    require_order(order);
    const double g = snr.gamma();
    if (order == 2) return q_function(std::sqrt(2.0 * g));
    const double a = 1.0 - 1.0 / std::sqrt(double(order));
    const double e = 2.0 * a * q_function(std::sqrt(3.0 * g / (order - 1)));
    return 1.0 - (1.0 - e) * (1.0 - e);
}

double channel_ser_rayleigh(int order, SnrPoint snr) {
    require_order(order);
    const double g = snr.gamma();
    if (order == 2) return 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
    const double a = 1.0 - 1.0 / std::sqrt(double(order));
    const double b = std::sqrt(3.0 * g / (2.0 * (order - 1) + 3.0 * g));
    const double v = 2.0 * a * (1.0 - b) -
                     a * a * (1.0 - (4.0 * b / std::numbers::pi) * std::atan(1.0 / b));
    return std::clamp(v, 0.0, 1.0);
}

double channel_ser(int order, SnrPoint snr, Channel channel) {
    return channel == Channel::awgn ? channel_ser_awgn(order, snr)
                                    : channel_ser_rayleigh(order, snr);
}

double rayleigh_average(double gamma, const std::function<double(double)>& f) {
    // Composite Gauss-Legendre over decade-spaced knots in t. The integrand
    // f(gamma t) e^{-t} transitions somewhere in t ~ [1e-7, 45] depending on
    // gamma; per-decade panels keep every scale resolved.
    static const double knots[] = {0.0,  1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1,
                                   0.3,  1.0,  2.0,  4.0,  8.0,  16.0, 32.0, 45.0};
    const auto& g = gl16();
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < std::size(knots); ++s) {
        const double a = knots[s], b = knots[s + 1];
        double panel = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double t = a + (b - a) * g.x[i];
            panel += g.w[i] * f(gamma * t) * std::exp(-t);
        }
        acc += (b - a) * panel;
    }
    return acc;
}

} // namespace punctsim
