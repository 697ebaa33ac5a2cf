#ifndef KWSFCM_METRICS_HPP
#define KWSFCM_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwsfcm/image.hpp"
#include "kwsfcm/parallel.hpp"

namespace kwsfcm {

struct DimensionMismatch : std::invalid_argument {
    DimensionMismatch() : std::invalid_argument("segmentation maps have different dimensions") {}
};
struct EmptyRegion : std::runtime_error {
    explicit EmptyRegion(int region)
        : std::runtime_error("region " + std::to_string(region) + " contains no pixels") {}
};
struct NoEdges : std::runtime_error {
    NoEdges() : std::runtime_error("no edge candidates: EQF undefined") {}
};

// ---------------------------------------------------------------------------
// Segmentation Accuracy
// ---------------------------------------------------------------------------

/// Percentage of pixels whose cluster agrees with the reference under the
/// best one-to-one cluster correspondence (exact assignment over the
/// overlap contingency table, so relabelings score identically).
inline double segmentation_accuracy(const SegmentationMap& map, const SegmentationMap& ref) {
    if (map.width != ref.width || map.height != ref.height) throw DimensionMismatch();
    const int rows = std::max(map.clusters, 1);
    const int cols = std::max(ref.clusters, 1);
    if (cols > 16 || rows > 64)
        throw std::invalid_argument("segmentation_accuracy: too many clusters for exact matching");

    std::vector<long long> overlap(static_cast<std::size_t>(rows) * cols, 0);
    for (std::size_t k = 0; k < map.size(); ++k)
        ++overlap[static_cast<std::size_t>(map.labels[k]) * cols + ref.labels[k]];

    // Injective assignment of map clusters to reference clusters that
    // maximizes total overlap, by subset DP over reference columns.
    const std::size_t nmask = std::size_t{1} << cols;
    std::vector<long long> dp(nmask, -1), next(nmask);
    dp[0] = 0;
    for (int row = 0; row < rows; ++row) {
        next = dp;  // leaving this row unassigned
        for (std::size_t mask = 0; mask < nmask; ++mask) {
            if (dp[mask] < 0) continue;
            for (int j = 0; j < cols; ++j) {
                if (mask & (std::size_t{1} << j)) continue;
                const std::size_t to = mask | (std::size_t{1} << j);
                const long long cand = dp[mask] + overlap[static_cast<std::size_t>(row) * cols + j];
                if (cand > next[to]) next[to] = cand;
            }
        }
        dp.swap(next);
    }
    long long best = 0;
    for (long long v : dp) best = std::max(best, v);
    return 100.0 * static_cast<double>(best) / static_cast<double>(map.size());
}

// ---------------------------------------------------------------------------
// Entropy measure
// ---------------------------------------------------------------------------

struct RegionEntropy {
    long long size = 0;
    double entropy = 0.0;
};

struct EntropyReport {
    double region_entropy = 0.0;  // H_r
    double layout_entropy = 0.0;  // H_l
    double combined = 0.0;        // E = H_r + H_l
    std::vector<RegionEntropy> regions;
};

/// Region entropy H_r (mean gray-level entropy inside each region, taken
/// from the image that was segmented) plus layout entropy H_l of the
/// region sizes. Lower E means purer regions in a simpler layout.
inline EntropyReport entropy_measure(const GrayImage& img, const SegmentationMap& map,
                                     double log_base = std::numbers::e) {
    if (map.width != img.width || map.height != img.height) throw DimensionMismatch();
    if (!(log_base > 1.0)) throw std::invalid_argument("entropy log base must be > 1");
    const int c = std::max(map.clusters, 1);
    const double log_div = std::log(log_base);

    std::vector<std::array<long long, 256>> hist(c);
    for (auto& h : hist) h.fill(0);
    std::vector<long long> sizes(c, 0);
    for (std::size_t k = 0; k < map.size(); ++k) {
        ++hist[map.labels[k]][img.pixels[k]];
        ++sizes[map.labels[k]];
    }

    EntropyReport report;
    report.regions.resize(c);
    const double total = static_cast<double>(map.size());
    for (int j = 0; j < c; ++j) {
        if (sizes[j] == 0) throw EmptyRegion(j);
        double h = 0.0;
        for (long long count : hist[j]) {
            if (count == 0) continue;
            const double p = static_cast<double>(count) / static_cast<double>(sizes[j]);
            h -= p * std::log(p);
        }
        h /= log_div;
        report.regions[j] = {sizes[j], h};
        const double share = static_cast<double>(sizes[j]) / total;
        report.region_entropy += share * h;
        report.layout_entropy -= share * std::log(share) / log_div;
    }
    report.combined = report.region_entropy + report.layout_entropy;
    return report;
}

// ---------------------------------------------------------------------------
// Edge Quality Factor
// ---------------------------------------------------------------------------

struct EqfParams {
    int window = 9;         // homogeneity window side N
    double alpha_k = 1.0;   // threshold scale
    double gamma = 80.0;    // gamma_{N^2} lookup value
    double threshold = 0.1; // blur threshold Th
    int levels = 256;       // gray-level range L

    void validate() const {
        if (window < 3 || window % 2 == 0) throw std::invalid_argument("EQF window must be odd and >= 3");
        if (threshold <= 0.0) throw std::invalid_argument("EQF threshold must be > 0");
        if (levels < 2) throw std::invalid_argument("EQF gray-level range must be >= 2");
        if (gamma <= 0.0) throw std::invalid_argument("EQF gamma must be > 0");
        if (alpha_k <= 0.0) throw std::invalid_argument("EQF alpha must be > 0");
    }
};

struct EqfReport {
    long long edge_count = 0;  // fuzzy-rule edge candidates
    long long blur_count = 0;  // final edges classified blurred
    double blur_ratio = 0.0;
    double eqf = 0.0;
    double homogeneity = 0.0;    // mean window homogeneity mu
    double derivative_gate = 0.0;  // K = alpha (1 - mu) gamma
    GrayImage candidates;  // 255 where the fuzzy rule fired
    GrayImage edges;       // 255 where the final selection kept an edge
    GrayImage blurred;     // 255 where a kept edge tested blurred
};

/// One of the eight fuzzy-derivative directions: step offset v and the
/// perpendicular offset p used for the companion derivatives.
struct EdgeDirection {
    int vx, vy;
    int px, py;
};

/// Direction table (N, NE, E, SE, S, SW, W, NW); p is v rotated a quarter
/// turn, and the set is closed under negation so each triple mirrors its
/// opposite direction.
inline const std::array<EdgeDirection, 8>& edge_directions() {
    static const std::array<EdgeDirection, 8> dirs = {{
        {0, -1, 1, 0},    // N
        {1, -1, 1, 1},    // NE
        {1, 0, 0, 1},     // E
        {1, 1, -1, 1},    // SE
        {0, 1, -1, 0},    // S
        {-1, 1, -1, -1},  // SW
        {-1, 0, 0, -1},   // W
        {-1, -1, 1, -1},  // NW
    }};
    return dirs;
}

/// Inverse blurriness along {h, v, d1, d2}. A direction with zero
/// derivative carries no evidence either way and is left undefined.
struct DirectionalBlurriness {
    std::array<double, 4> br{};
    std::array<bool, 4> defined{};
};

inline DirectionalBlurriness inverse_blurriness(const GrayImage& img, int x, int y) {
    const double f = img.at_clamped(x, y);
    const double grads[4] = {
        std::abs(double(img.at_clamped(x + 1, y)) - img.at_clamped(x - 1, y)),
        std::abs(double(img.at_clamped(x, y + 1)) - img.at_clamped(x, y - 1)),
        std::abs(double(img.at_clamped(x + 1, y - 1)) - img.at_clamped(x - 1, y + 1)),
        std::abs(double(img.at_clamped(x + 1, y + 1)) - img.at_clamped(x - 1, y - 1)),
    };
    DirectionalBlurriness out;
    for (int d = 0; d < 4; ++d) {
        if (grads[d] == 0.0) continue;
        const double half = 0.5 * grads[d];
        out.br[d] = std::abs(f - half) / half;
        out.defined[d] = true;
    }
    return out;
}

/// Full EQF pipeline: fuzzy-rule candidate selection over 8 directions,
/// final selection against candidate neighbors, inverse-blurriness blur
/// classification, then EQF = 1 - blur_count / edge_count.
inline EqfReport eqf(const GrayImage& img, const EqfParams& params) {
    params.validate();
    if (img.width < params.window || img.height < params.window)
        throw std::invalid_argument("image smaller than the EQF homogeneity window");
    const int n = static_cast<int>(img.size());
    const int radius = (params.window - 1) / 2;

    // Stage 1: expected homogeneity over every window position.
    std::vector<double> homogeneity(n);
    parallel_for(0, n, [&](int k) {
        const int x = k % img.width;
        const int y = k / img.width;
        std::uint8_t lo = 255, hi = 0;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                const std::uint8_t v = img.at_clamped(x + dx, y + dy);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        homogeneity[k] = 1.0 - static_cast<double>(hi - lo) / params.levels;
    });
    double mu = 0.0;
    for (double h : homogeneity) mu += h;
    mu /= n;
    const double gate = params.alpha_k * (1.0 - mu) * params.gamma;

    EqfReport report;
    report.homogeneity = mu;
    report.derivative_gate = gate;
    report.candidates = GrayImage(img.width, img.height);
    report.edges = GrayImage(img.width, img.height);
    report.blurred = GrayImage(img.width, img.height);

    // Stage 2: a pixel is an edge candidate when, along any direction, at
    // least two of the three fuzzy derivatives clear the gate.
    parallel_for(0, n, [&](int k) {
        const int x = k % img.width;
        const int y = k / img.width;
        const double center = img.at_clamped(x, y);
        for (const EdgeDirection& d : edge_directions()) {
            const double a = std::abs(double(img.at_clamped(x + d.vx, y + d.vy)) - center);
            const double b = std::abs(double(img.at_clamped(x + d.px + d.vx, y + d.py + d.vy)) -
                                      img.at_clamped(x + d.px, y + d.py));
            const double c = std::abs(double(img.at_clamped(x - d.px + d.vx, y - d.py + d.vy)) -
                                      img.at_clamped(x - d.px, y - d.py));
            const int large = (a > gate) + (b > gate) + (c > gate);
            if (large >= 2) {
                report.candidates.pixels[k] = 255;
                break;
            }
        }
    });

    // Stage 3: keep candidates brighter than their dimmest candidate
    // neighbor; candidates with no candidate neighbor are kept outright.
    parallel_for(0, n, [&](int k) {
        if (!report.candidates.pixels[k]) return;
        const int x = k % img.width;
        const int y = k / img.width;
        int min_neighbor = 256;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                if (report.candidates.at_clamped(x + dx, y + dy))
                    min_neighbor = std::min(min_neighbor, int(img.at_clamped(x + dx, y + dy)));
            }
        if (min_neighbor == 256 || img.pixels[k] > min_neighbor) report.edges.pixels[k] = 255;
    });

    // Stage 4: blur classification of kept edges.
    parallel_for(0, n, [&](int k) {
        if (!report.edges.pixels[k]) return;
        const DirectionalBlurriness br = inverse_blurriness(img, k % img.width, k / img.width);
        bool any = false, all_below = true;
        for (int d = 0; d < 4; ++d) {
            if (!br.defined[d]) continue;
            any = true;
            if (br.br[d] >= params.threshold) all_below = false;
        }
        if (any && all_below) report.blurred.pixels[k] = 255;
    });

    for (int k = 0; k < n; ++k) {
        if (report.candidates.pixels[k]) ++report.edge_count;
        if (report.blurred.pixels[k]) ++report.blur_count;
    }
    if (report.edge_count == 0) throw NoEdges();
    report.blur_ratio = static_cast<double>(report.blur_count) / static_cast<double>(report.edge_count);
    report.eqf = 1.0 - report.blur_ratio;
    return report;
}

}  // namespace kwsfcm

#endif
