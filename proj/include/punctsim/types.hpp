#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace punctsim {

enum class Channel { awgn, rayleigh };
enum class Mapper { urllc, srm, esrm };
enum class Scheme { proposed, baseline };

inline const char* to_string(Channel c) { return c == Channel::awgn ? "awgn" : "rayleigh"; }
inline const char* to_string(Mapper m) {
    switch (m) {
        case Mapper::urllc: return "urllc";
        case Mapper::srm: return "srm";
        default: return "esrm";
    }
}
inline const char* to_string(Scheme s) { return s == Scheme::proposed ? "proposed" : "baseline"; }

/// Linear SNR per symbol. dB <-> linear round trips are exact to 1e-12 relative.
class SnrPoint {
public:
    SnrPoint() = default;
    explicit SnrPoint(double gamma_linear) : gamma_(gamma_linear) {
        if (!(gamma_ >= 0.0) || !std::isfinite(gamma_))
            throw std::invalid_argument("SnrPoint: gamma must be finite and >= 0");
    }
    static SnrPoint from_db(double db) { return SnrPoint(std::pow(10.0, db / 10.0)); }
    double gamma() const { return gamma_; }
    double db() const { return 10.0 * std::log10(gamma_); }

private:
    double gamma_ = 1.0;
};

inline bool order_supported(int order) {
    return order == 2 || order == 4 || order == 16 || order == 64;
}

inline void require_order(int order) {
    if (!order_supported(order))
        throw std::invalid_argument("unsupported modulation order " + std::to_string(order) +
                                    " (supported: 2, 4, 16, 64)");
}

} // namespace punctsim
