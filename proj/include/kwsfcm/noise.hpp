#ifndef KWSFCM_NOISE_HPP
#define KWSFCM_NOISE_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "kwsfcm/image.hpp"
#include "kwsfcm/parallel.hpp"
#include "kwsfcm/rng.hpp"

namespace kwsfcm {

struct InvalidLevel : std::invalid_argument {
    explicit InvalidLevel(const std::string& what) : std::invalid_argument("invalid noise level: " + what) {}
};

enum class NoiseKind { salt_pepper, gaussian, poisson, speckle, rician };

/// Level conventions, pinned because the literature leaves them loose:
/// salt_pepper — fraction of pixels corrupted; gaussian and rician —
/// additive sigma = level * 255; speckle — variance of the multiplicative
/// term; poisson ignores level (rates come from the pixel values).
struct NoiseSpec {
    NoiseKind kind = NoiseKind::salt_pepper;
    double level = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (level < 0.0) throw InvalidLevel("must be >= 0");
        if (kind == NoiseKind::salt_pepper && level > 1.0)
            throw InvalidLevel("salt & pepper density must be in [0,1]");
    }
};

namespace detail {

inline std::uint8_t clamp_round(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::nearbyint(v));  // ties to even
}

}  // namespace detail

/// Corrupts an image deterministically: each pixel owns one counter-based
/// stream keyed by its index, so the output is bit-identical regardless of
/// scheduling.
inline GrayImage add_noise(const GrayImage& img, const NoiseSpec& spec) {
    spec.validate();
    GrayImage out(img.width, img.height);
    const int n = static_cast<int>(img.size());

    parallel_for(0, n, [&](int k) {
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(k));
        const double x = img.pixels[k];
        switch (spec.kind) {
            case NoiseKind::salt_pepper: {
                if (rng.next_uniform() < spec.level)
                    out.pixels[k] = rng.next_uniform() < 0.5 ? 0 : 255;
                else
                    out.pixels[k] = img.pixels[k];
                break;
            }
            case NoiseKind::gaussian: {
                const double sigma = 255.0 * spec.level;
                out.pixels[k] = detail::clamp_round(x + sigma * rng.next_normal());
                break;
            }
            case NoiseKind::poisson: {
                out.pixels[k] = detail::clamp_round(static_cast<double>(rng.next_poisson(x)));
                break;
            }
            case NoiseKind::speckle: {
                const double sigma = std::sqrt(spec.level);
                out.pixels[k] = detail::clamp_round(x * (1.0 + sigma * rng.next_normal()));
                break;
            }
            case NoiseKind::rician: {
                const double sigma = 255.0 * spec.level;
                const double re = x + sigma * rng.next_normal();
                const double im = sigma * rng.next_normal();
                out.pixels[k] = detail::clamp_round(std::sqrt(re * re + im * im));
                break;
            }
        }
    });
    return out;
}

inline NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "salt_pepper") return NoiseKind::salt_pepper;
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "poisson") return NoiseKind::poisson;
    if (name == "speckle") return NoiseKind::speckle;
    if (name == "rician") return NoiseKind::rician;
    throw std::invalid_argument("unknown noise kind '" + name + "'");
}

inline const char* to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::salt_pepper: return "salt_pepper";
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::poisson: return "poisson";
        case NoiseKind::speckle: return "speckle";
        case NoiseKind::rician: return "rician";
    }
    return "?";
}

}  // namespace kwsfcm

#endif
