#pragma once

// Gray-mapped unit-energy QAM constellations, ML detection, and the
// single-link channel SER formulas for AWGN and Rayleigh fading.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "punctsim/types.hpp"

namespace punctsim {

using cd = std::complex<double>;

/// Axis-aligned ML decision cell; bounds may be +/-infinity.
struct DecisionCell {
    double xlo, xhi, ylo, yhi;

    bool contains(cd p) const {
        return p.real() >= xlo && p.real() <= xhi && p.imag() >= ylo && p.imag() <= yhi;
    }
    /// Euclidean distance from p to the cell's boundary set (0 if p lies on it).
    double boundary_distance(cd p) const;
};

struct Constellation {
    int order = 0;
    std::vector<cd> points;          // unit average energy
    std::vector<std::string> labels; // Gray bit strings, log2(order) bits
    double min_distance = 0.0;
    std::vector<double> axis_levels; // sorted per-axis amplitudes (scaled)
    std::vector<DecisionCell> cells; // ML decision cell per symbol

    int bits_per_symbol() const;
    double average_energy() const;
};

/// Deterministic construction for order in {2, 4, 16, 64}.
Constellation build_constellation(int order);

/// Index of the nearest constellation point (lowest index on ties).
int ml_detect(const Constellation& c, cd sample);

/// Batch ML detection through the runtime-dispatched kernel.
void ml_detect_batch(const Constellation& c, std::span<const cd> samples,
                     std::span<std::uint16_t> out);

/// Gaussian tail Q(x) = P(N(0,1) > x), accurate to ~1e-15 absolute.
double q_function(double x);

/// P(X in [lo, hi]) for X ~ N(mu, sigma^2); lo/hi may be infinite.
double normal_interval_probability(double lo, double hi, double mu, double sigma);

/// Probability that "sent" lands in the cell of symbol `idx` at linear SNR gamma
/// (complex noise variance 1/gamma, i.e. unit-energy signalling).
double cell_probability(const Constellation& c, int idx, cd sent, double gamma);

/// Channel SER. AWGN: Q(sqrt(2 gamma)) for order 2, else 4a*Q(sqrt(3g/(m-1)))
/// clamped to [0,1]. Rayleigh: exact BPSK formula for order 2, else the
/// closed-form average 2a(1-b) - a^2 (1 - (4b/pi) atan(1/b)).
double channel_ser_awgn(int order, SnrPoint snr);
double channel_ser_rayleigh(int order, SnrPoint snr);
double channel_ser(int order, SnrPoint snr, Channel channel);

/// Exact square-QAM AWGN SER, 1 - (1 - e)^2 with e the per-axis PAM error.
/// Kept as a reference comparison to the approximation above.
double channel_ser_awgn_exact(int order, SnrPoint snr);

/// Average of f(gamma * t) over t ~ Exp(1) (Rayleigh power fading), by
/// Gauss-Legendre quadrature on the substitution t = -log(u).
double rayleigh_average(double gamma, const std::function<double(double)>& f);

} // namespace punctsim
