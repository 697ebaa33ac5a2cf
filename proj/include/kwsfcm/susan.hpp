#ifndef KWSFCM_SUSAN_HPP
#define KWSFCM_SUSAN_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwsfcm/image.hpp"
#include "kwsfcm/parallel.hpp"

namespace kwsfcm {

struct InvalidRatio : std::invalid_argument {
    explicit InvalidRatio(double r)
        : std::invalid_argument("min_ratio " + std::to_string(r) + " outside (0,1)") {}
};

/// Weighting of the 37-pixel circular mask. `circular` is the ring scheme
/// (inverse Manhattan move count, constant per ring); `uniform` and
/// `cartesian` are study modes for comparing against the original SUSAN
/// mask and inverse-Euclidean weights.
enum class MaskWeightMode { circular, uniform, cartesian };

struct MaskOffset {
    int dx = 0;
    int dy = 0;
};

/// The SUSAN mask: 37 offsets in 7 rows of 3,5,7,7,7,5,3 pixels.
///
/// Weights are kept as scaled numerators over a common denominator so that
/// ring-weight sums are exact: the circular scheme stores twelfths, making
/// the full-mask total come out as 192/12 = 16 with no rounding residue.
struct CircularMask {
    std::vector<MaskOffset> offsets;
    std::vector<double> weights;  // weights[i] == scaled[i] / scale
    std::vector<double> scaled;
    double scale = 1.0;

    std::size_t size() const { return offsets.size(); }

    double total_weight() const {
        double acc = 0.0;
        for (double s : scaled) acc += s;
        return acc / scale;
    }
};

inline CircularMask build_mask(MaskWeightMode mode = MaskWeightMode::circular) {
    // Row half-widths of the 37-pixel disc, top to bottom.
    static constexpr int kHalfWidth[7] = {1, 2, 3, 3, 3, 2, 1};
    CircularMask mask;
    mask.offsets.reserve(37);
    for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -kHalfWidth[dy + 3]; dx <= kHalfWidth[dy + 3]; ++dx)
            mask.offsets.push_back({dx, dy});

    mask.scaled.reserve(37);
    switch (mode) {
        case MaskWeightMode::circular:
            mask.scale = 12.0;
            for (const auto& o : mask.offsets) {
                const int ring = std::abs(o.dx) + std::abs(o.dy);
                mask.scaled.push_back(ring == 0 ? 12.0 : 12.0 / ring);
            }
            break;
        case MaskWeightMode::uniform:
            mask.scale = 1.0;
            mask.scaled.assign(37, 1.0);
            break;
        case MaskWeightMode::cartesian:
            mask.scale = 1.0;
            for (const auto& o : mask.offsets) {
                const double d = std::sqrt(double(o.dx * o.dx + o.dy * o.dy));
                mask.scaled.push_back(o.dx == 0 && o.dy == 0 ? 1.0 : 1.0 / d);
            }
            break;
    }
    mask.weights.reserve(37);
    for (double s : mask.scaled) mask.weights.push_back(s / mask.scale);
    return mask;
}

/// Intensity-similarity parameters for the weighted SUSAN area.
/// t <= 0 means "solve from min_ratio/max_dev/exponent".
struct SusanParams {
    double t = 0.0;
    double min_ratio = 1.0 / 16.0;
    double max_dev = 255.0;
    int exponent = 6;
    MaskWeightMode weight_mode = MaskWeightMode::circular;

    void validate() const {
        if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InvalidRatio(min_ratio);
        if (exponent < 2 || exponent % 2 != 0)
            throw std::invalid_argument("susan exponent must be even and >= 2");
        if (max_dev <= 0.0) throw std::invalid_argument("susan max_dev must be > 0");
    }
};

/// Solves exp(-(max_dev/t)^exponent) = min_ratio for t. With the defaults
/// (1/16, 255, 6) this is the 215.1424 intensity scale.
inline double solve_t(double min_ratio, double max_dev, int exponent) {
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InvalidRatio(min_ratio);
    return max_dev / std::pow(std::log(1.0 / min_ratio), 1.0 / exponent);
}

inline SusanParams resolved(SusanParams params) {
    params.validate();
    if (params.t <= 0.0) params.t = solve_t(params.min_ratio, params.max_dev, params.exponent);
    return params;
}

namespace detail {

// ((I(r)-I(r0))/t)^exponent for an even exponent.
inline double deviation_term(double diff, double t, int exponent) {
    const double q = diff / t;
    double acc = 1.0;
    for (int e = 0; e < exponent; ++e) acc *= q;
    return acc;
}

}  // namespace detail

/// Circular-weighted mean over the full 37-pixel mask (nucleus included),
/// sampling past the border by edge replication.
inline double weighted_mean(const GrayImage& img, int x, int y, const CircularMask& mask) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        num += mask.scaled[i] * img.at_clamped(x + mask.offsets[i].dx, y + mask.offsets[i].dy);
        den += mask.scaled[i];
    }
    return num / den;
}

/// Weighted SUSAN area: sum of w(r)*exp(-((I(r)-I(r0))/t)^exponent) over the
/// whole mask. The nucleus term is always w=1*exp(0)=1; a perfectly uniform
/// neighborhood totals the full mask weight (16 for the circular scheme).
inline double weighted_susan_area(const GrayImage& img, int x, int y, const CircularMask& mask,
                                  const SusanParams& params) {
    const double center = img.at_clamped(x, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const double v = img.at_clamped(x + mask.offsets[i].dx, y + mask.offsets[i].dy);
        acc += mask.scaled[i] * std::exp(-detail::deviation_term(v - center, params.t, params.exponent));
    }
    return acc / mask.scale;
}

/// Gaussian membership of an area value against the global maximum,
/// exp(-(max-area)^2 / (2 sigma^2)); sigma=0 degenerates to full membership.
inline double area_membership(double area, double area_max, double sigma_area) {
    if (sigma_area == 0.0) return 1.0;
    const double gap = area_max - area;
    return std::exp(-(gap * gap) / (2.0 * sigma_area * sigma_area));
}

/// Per-pixel fields the solver consumes: weighted means, weighted SUSAN
/// areas, and the damping coefficients s = 1 - membership.
struct NeighborhoodField {
    int width = 0;
    int height = 0;
    std::vector<double> weighted_mean;
    std::vector<double> area;
    std::vector<double> damping;
    double sigma_area = 0.0;
    double area_max = 0.0;

    std::size_t size() const { return damping.size(); }
};

inline NeighborhoodField damping_field(const GrayImage& img, const CircularMask& mask,
                                       const SusanParams& raw_params) {
    if (img.size() == 0) throw std::invalid_argument("damping_field: empty image");
    const SusanParams params = resolved(raw_params);

    NeighborhoodField field;
    field.width = img.width;
    field.height = img.height;
    const int n = static_cast<int>(img.size());
    field.weighted_mean.resize(n);
    field.area.resize(n);
    field.damping.resize(n);

    parallel_for(0, n, [&](int k) {
        const int x = k % img.width;
        const int y = k / img.width;
        field.weighted_mean[k] = weighted_mean(img, x, y, mask);
        field.area[k] = weighted_susan_area(img, x, y, mask, params);
    });

    // Global reductions stay serial so results are schedule-independent.
    double max_area = field.area[0];
    double sum = 0.0;
    for (double a : field.area) {
        if (a > max_area) max_area = a;
        sum += a;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (double a : field.area) sq += (a - mean) * (a - mean);
    field.area_max = max_area;
    field.sigma_area = std::sqrt(sq / n);  // population deviation

    parallel_for(0, n, [&](int k) {
        field.damping[k] = 1.0 - area_membership(field.area[k], field.area_max, field.sigma_area);
    });
    return field;
}

/// Damping coefficients rendered as a gray heat-map (s=0 black, s=1 white).
inline GrayImage damping_to_pgm(const NeighborhoodField& field) {
    GrayImage out(field.width, field.height);
    for (std::size_t k = 0; k < field.size(); ++k) {
        double v = field.damping[k] * 255.0;
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        out.pixels[k] = static_cast<std::uint8_t>(std::lround(v));
    }
    return out;
}

inline MaskWeightMode weight_mode_from_string(const std::string& name) {
    if (name == "circular") return MaskWeightMode::circular;
    if (name == "uniform") return MaskWeightMode::uniform;
    if (name == "cartesian") return MaskWeightMode::cartesian;
    throw std::invalid_argument("unknown weight mode '" + name + "'");
}

inline const char* to_string(MaskWeightMode mode) {
    switch (mode) {
        case MaskWeightMode::circular: return "circular";
        case MaskWeightMode::uniform: return "uniform";
        case MaskWeightMode::cartesian: return "cartesian";
    }
    return "?";
}

}  // namespace kwsfcm

#endif
