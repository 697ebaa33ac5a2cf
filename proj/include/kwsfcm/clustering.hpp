#ifndef KWSFCM_CLUSTERING_HPP
#define KWSFCM_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwsfcm/image.hpp"
#include "kwsfcm/kernel.hpp"
#include "kwsfcm/parallel.hpp"
#include "kwsfcm/rng.hpp"
#include "kwsfcm/susan.hpp"

namespace kwsfcm {

struct DegenerateCluster : std::runtime_error {
    explicit DegenerateCluster(int cluster)
        : std::runtime_error("cluster " + std::to_string(cluster) + " has zero update denominator") {}
};

enum class InitMode { equispaced, seeded_random };

struct ClusterParams {
    int c = 2;
    double m = 2.0;        // fuzzifier
    double alpha = 3.8;    // neighbor-term weight
    double epsilon = 0.001;
    int max_iter = 100;
    InitMode init = InitMode::equispaced;
    std::uint64_t seed = 0;
    bool use_damping = true;  // false: s(k) == 1, the weighted-mean-only objective
    std::vector<double> initial_centroids;  // overrides init when nonempty

    void validate() const {
        if (c < 1) throw std::invalid_argument("cluster count must be >= 1");
        if (m <= 1.0) throw std::invalid_argument("fuzzifier m must be > 1");
        if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
        if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
        if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
        if (!initial_centroids.empty() && static_cast<int>(initial_centroids.size()) != c)
            throw std::invalid_argument("initial centroid count must equal c");
    }
};

/// Fuzzy memberships, pixel-major: u(i,k) for cluster i, pixel k. Every
/// pixel column sums to 1.
struct PartitionMatrix {
    int clusters = 0;
    int pixels = 0;
    std::vector<double> u;

    PartitionMatrix() = default;
    PartitionMatrix(int c, int n) : clusters(c), pixels(n), u(static_cast<std::size_t>(c) * n, 0.0) {}

    double at(int i, int k) const { return u[static_cast<std::size_t>(k) * clusters + i]; }
    double& at(int i, int k) { return u[static_cast<std::size_t>(k) * clusters + i]; }
};

using Centroids = std::vector<double>;

struct SolveTrace {
    struct Iteration {
        double objective = 0.0;            // J after the partition update, at the centroids it used
        Centroids centroids;               // centroids after the update step
        double max_membership_change = 0.0;
        double max_centroid_change = 0.0;
    };
    std::vector<Iteration> iterations;
    bool converged = false;
    bool objective_increased = false;      // any iteration-to-iteration rise of J
    double max_column_sum_error = 0.0;     // partition sanity over every iteration
    double membership_min = 1.0;
    double membership_max = 0.0;

    int iteration_count() const { return static_cast<int>(iterations.size()); }
};

struct SegmentationResult {
    SegmentationMap map;
    Centroids centroids;
    PartitionMatrix partition;
    SolveTrace trace;
};

/// Unweighted mean of the 8-connected square neighborhood (nucleus
/// excluded), the spatial term of the Chen baseline.
inline std::vector<double> square_mean_field(const GrayImage& img) {
    std::vector<double> mean(img.size());
    parallel_for(0, static_cast<int>(img.size()), [&](int k) {
        const int x = k % img.width;
        const int y = k / img.width;
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                acc += img.at_clamped(x + dx, y + dy);
            }
        mean[k] = acc / 8.0;
    });
    return mean;
}

namespace detail {

// Membership column from precomputed distances: u_i proportional to
// d_i^(-1/(m-1)), with zero distances absorbing all mass equally.
inline void membership_column(const double* d, int c, double m, double* u) {
    int zeros = 0;
    for (int i = 0; i < c; ++i)
        if (d[i] == 0.0) ++zeros;
    if (zeros > 0) {
        const double share = 1.0 / zeros;
        for (int i = 0; i < c; ++i) u[i] = (d[i] == 0.0) ? share : 0.0;
        return;
    }
    const double expo = 1.0 / (m - 1.0);
    for (int i = 0; i < c; ++i) {
        double denom = 0.0;
        for (int j = 0; j < c; ++j) denom += std::pow(d[i] / d[j], expo);
        u[i] = 1.0 / denom;
    }
}

// d_ik of the kernel-spatial family: s(k)(1-K(x_k,v_i)) + alpha(1-K(mean_k,v_i)).
inline void spatial_distances(double x, double s, double mean, const Centroids& v, double alpha,
                              const KernelParams& kp, double* d) {
    for (std::size_t i = 0; i < v.size(); ++i)
        d[i] = s * (1.0 - kernel_eval(x, v[i], kp)) + alpha * (1.0 - kernel_eval(mean, v[i], kp));
}

inline Centroids initial_centroids(const std::vector<double>& x, const ClusterParams& p) {
    if (!p.initial_centroids.empty()) return p.initial_centroids;
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double mn = *mn_it, mx = *mx_it;
    Centroids v(p.c);
    if (p.init == InitMode::seeded_random) {
        CounterRng rng(p.seed, 0xC3A5u);
        for (int i = 0; i < p.c; ++i) v[i] = mn + rng.next_uniform() * (mx - mn);
    } else {
        for (int i = 0; i < p.c; ++i) v[i] = mn + (i + 0.5) * (mx - mn) / p.c;
    }
    return v;
}

inline SegmentationMap defuzzify(const PartitionMatrix& u, int width, int height) {
    SegmentationMap map(width, height, u.clusters);
    for (int k = 0; k < u.pixels; ++k) {
        int best = 0;
        double best_u = u.at(0, k);
        for (int i = 1; i < u.clusters; ++i)
            if (u.at(i, k) > best_u) {  // strict: ties keep the lowest index
                best_u = u.at(i, k);
                best = i;
            }
        map.labels[k] = best;
    }
    return map;
}

// Alternating optimization shared by all three clusterers. The Model
// supplies kernels+distances and the centroid rule; per-pixel passes run in
// parallel, every reduction is a serial loop in pixel order, so outputs are
// bit-identical for any thread count.
template <class Model>
SegmentationResult solve(const std::vector<double>& x, int width, int height,
                         const ClusterParams& params, Model&& model) {
    params.validate();
    const int n = static_cast<int>(x.size());
    const int c = params.c;

    Centroids v = initial_centroids(x, params);
    PartitionMatrix u(c, n);
    for (double& val : u.u) val = 1.0 / c;

    std::vector<double> objective_terms(n);
    std::vector<double> um(static_cast<std::size_t>(c) * n);
    PartitionMatrix u_prev = u;

    SolveTrace trace;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        model.prepare(v);

        parallel_for(0, n, [&](int k) {
            double d[64];
            double* dk = c <= 64 ? d : nullptr;
            std::vector<double> dheap;
            if (!dk) {
                dheap.resize(c);
                dk = dheap.data();
            }
            model.distances(k, v, dk);
            double* uk = &u.u[static_cast<std::size_t>(k) * c];
            membership_column(dk, c, params.m, uk);
            double jk = 0.0;
            for (int i = 0; i < c; ++i) {
                const double w = std::pow(uk[i], params.m);
                um[static_cast<std::size_t>(k) * c + i] = w;
                jk += w * dk[i];
            }
            objective_terms[k] = jk;
        });

        double objective = 0.0;
        for (int k = 0; k < n; ++k) objective += objective_terms[k];

        double max_du = 0.0;
        for (std::size_t idx = 0; idx < u.u.size(); ++idx) {
            const double val = u.u[idx];
            max_du = std::max(max_du, std::abs(val - u_prev.u[idx]));
            trace.membership_min = std::min(trace.membership_min, val);
            trace.membership_max = std::max(trace.membership_max, val);
        }
        for (int k = 0; k < n; ++k) {
            double col = 0.0;
            for (int i = 0; i < c; ++i) col += u.at(i, k);
            trace.max_column_sum_error = std::max(trace.max_column_sum_error, std::abs(col - 1.0));
        }
        u_prev.u = u.u;

        Centroids v_new = model.centroids(x, um, v);

        double max_dv = 0.0;
        for (int i = 0; i < c; ++i) max_dv = std::max(max_dv, std::abs(v_new[i] - v[i]));
        v = std::move(v_new);

        if (!trace.iterations.empty() && objective > trace.iterations.back().objective + 1e-12)
            trace.objective_increased = true;
        trace.iterations.push_back({objective, v, max_du, max_dv});

        if (max_dv < params.epsilon) {
            trace.converged = true;
            break;
        }
    }

    SegmentationResult result;
    result.map = defuzzify(u, width, height);
    result.centroids = std::move(v);
    result.partition = std::move(u);
    result.trace = std::move(trace);
    return result;
}

// Classical FCM: squared Euclidean distance, plain weighted-average centroids.
struct FcmModel {
    const std::vector<double>& x;

    void prepare(const Centroids&) {}

    void distances(int k, const Centroids& v, double* d) const {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double diff = x[k] - v[i];
            d[i] = diff * diff;
        }
    }

    Centroids centroids(const std::vector<double>& data, const std::vector<double>& um,
                        const Centroids& v_prev) const {
        const int c = static_cast<int>(v_prev.size());
        const int n = static_cast<int>(data.size());
        Centroids v(c);
        for (int i = 0; i < c; ++i) {
            double num = 0.0, den = 0.0;
            for (int k = 0; k < n; ++k) {
                const double w = um[static_cast<std::size_t>(k) * c + i];
                num += w * data[k];
                den += w;
            }
            if (den == 0.0) throw DegenerateCluster(i);
            v[i] = num / den;
        }
        return v;
    }
};

// Kernel clustering with a spatial companion value per pixel. Covers both
// the Chen baseline (s == 1, square-neighborhood mean) and KWSFCM (SUSAN
// damping, circular weighted mean). Kernel evaluations for the centroid
// step reuse the values computed at the current iterate.
struct KernelSpatialModel {
    const std::vector<double>& x;
    const std::vector<double>& s;
    const std::vector<double>& mean;
    double alpha;
    KernelParams kernel;

    std::vector<double> k_x{};     // K(x_k, v_i), pixel-major
    std::vector<double> k_mean{};  // K(mean_k, v_i)

    void prepare(const Centroids& v) {
        const int c = static_cast<int>(v.size());
        const int n = static_cast<int>(x.size());
        k_x.resize(static_cast<std::size_t>(c) * n);
        k_mean.resize(static_cast<std::size_t>(c) * n);
        parallel_for(0, n, [&](int k) {
            for (int i = 0; i < c; ++i) {
                k_x[static_cast<std::size_t>(k) * c + i] = kernel_eval(x[k], v[i], kernel);
                k_mean[static_cast<std::size_t>(k) * c + i] = kernel_eval(mean[k], v[i], kernel);
            }
        });
    }

    void distances(int k, const Centroids& v, double* d) const {
        const int c = static_cast<int>(v.size());
        for (int i = 0; i < c; ++i)
            d[i] = s[k] * (1.0 - k_x[static_cast<std::size_t>(k) * c + i]) +
                   alpha * (1.0 - k_mean[static_cast<std::size_t>(k) * c + i]);
    }

    Centroids centroids(const std::vector<double>& data, const std::vector<double>& um,
                        const Centroids& v_prev) const {
        const int c = static_cast<int>(v_prev.size());
        const int n = static_cast<int>(data.size());
        Centroids v(c);
        for (int i = 0; i < c; ++i) {
            double num = 0.0, den = 0.0;
            for (int k = 0; k < n; ++k) {
                const std::size_t idx = static_cast<std::size_t>(k) * c + i;
                const double w = um[idx];
                num += w * (s[k] * k_x[idx] * data[k] + alpha * k_mean[idx] * mean[k]);
                den += w * (s[k] * k_x[idx] + alpha * k_mean[idx]);
            }
            if (den == 0.0 || !std::isfinite(den)) throw DegenerateCluster(i);
            v[i] = num / den;
        }
        return v;
    }
};

inline std::vector<double> to_doubles(const GrayImage& img) {
    return std::vector<double>(img.pixels.begin(), img.pixels.end());
}

}  // namespace detail

/// One KWSFCM partition step at fixed centroids, using the additive
/// distance d = s(1-K(x,v)) + alpha(1-K(mean,v)).
inline PartitionMatrix update_partition(const GrayImage& img, const NeighborhoodField& field,
                                        const Centroids& v, const ClusterParams& params,
                                        const KernelParams& kparams) {
    const int n = static_cast<int>(img.size());
    const int c = static_cast<int>(v.size());
    PartitionMatrix u(c, n);
    parallel_for(0, n, [&](int k) {
        std::vector<double> d(c);
        detail::spatial_distances(img.pixels[k], field.damping[k], field.weighted_mean[k], v,
                                  params.alpha, kparams, d.data());
        detail::membership_column(d.data(), c, params.m, &u.u[static_cast<std::size_t>(k) * c]);
    });
    return u;
}

/// One KWSFCM centroid step; kernels are evaluated at the previous iterate.
inline Centroids update_centroids(const GrayImage& img, const NeighborhoodField& field,
                                  const PartitionMatrix& u, const Centroids& v_prev,
                                  const ClusterParams& params, const KernelParams& kparams) {
    const int n = static_cast<int>(img.size());
    const int c = static_cast<int>(v_prev.size());
    Centroids v(c);
    for (int i = 0; i < c; ++i) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < n; ++k) {
            const double w = std::pow(u.at(i, k), params.m);
            const double kx = kernel_eval(img.pixels[k], v_prev[i], kparams);
            const double km = kernel_eval(field.weighted_mean[k], v_prev[i], kparams);
            num += w * (field.damping[k] * kx * img.pixels[k] + params.alpha * km * field.weighted_mean[k]);
            den += w * (field.damping[k] * kx + params.alpha * km);
        }
        if (den == 0.0 || !std::isfinite(den)) throw DegenerateCluster(i);
        v[i] = num / den;
    }
    return v;
}

/// Classical FCM; also the reference-map generator for the pipeline.
inline SegmentationResult fcm_segment(const GrayImage& img, const ClusterParams& params) {
    if (img.size() == 0) throw std::invalid_argument("fcm_segment: empty image");
    const std::vector<double> x = detail::to_doubles(img);
    return detail::solve(x, img.width, img.height, params, detail::FcmModel{x});
}

/// Chen's spatially constrained kernel FCM (square-neighborhood mean, no
/// damping).
inline SegmentationResult kfcm_s_segment(const GrayImage& img, const ClusterParams& params,
                                         const KernelParams& kparams) {
    if (img.size() == 0) throw std::invalid_argument("kfcm_s_segment: empty image");
    kparams.validate();
    const std::vector<double> x = detail::to_doubles(img);
    const std::vector<double> ones(x.size(), 1.0);
    const std::vector<double> mean = square_mean_field(img);
    return detail::solve(x, img.width, img.height, params,
                         detail::KernelSpatialModel{x, ones, mean, params.alpha, kparams});
}

/// KWSFCM on a precomputed neighborhood field.
inline SegmentationResult kwsfcm_segment(const GrayImage& img, const NeighborhoodField& field,
                                         const ClusterParams& params, const KernelParams& kparams) {
    if (img.size() == 0) throw std::invalid_argument("kwsfcm_segment: empty image");
    if (field.width != img.width || field.height != img.height)
        throw std::invalid_argument("kwsfcm_segment: field dimensions differ from image");
    kparams.validate();
    const std::vector<double> x = detail::to_doubles(img);
    std::vector<double> s = field.damping;
    if (!params.use_damping) s.assign(s.size(), 1.0);
    return detail::solve(x, img.width, img.height, params,
                         detail::KernelSpatialModel{x, s, field.weighted_mean, params.alpha, kparams});
}

/// KWSFCM end to end: builds the mask, computes the damping field once
/// (it does not change across iterations), then runs the solver.
inline SegmentationResult kwsfcm_segment(const GrayImage& img, const ClusterParams& params,
                                         const KernelParams& kparams, const SusanParams& sparams) {
    const NeighborhoodField field = damping_field(img, build_mask(sparams.weight_mode), sparams);
    return kwsfcm_segment(img, field, params, kparams);
}

/// Renders a segmentation by replacing each pixel with its cluster centroid.
inline GrayImage render_by_centroids(const SegmentationMap& map, const Centroids& centroids) {
    GrayImage out(map.width, map.height);
    for (std::size_t k = 0; k < map.size(); ++k) {
        double v = centroids[static_cast<std::size_t>(map.labels[k])];
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        out.pixels[k] = static_cast<std::uint8_t>(std::lround(v));
    }
    return out;
}

/// Renders labels as evenly spaced gray levels (an indexed label image).
inline GrayImage render_labels(const SegmentationMap& map) {
    GrayImage out(map.width, map.height);
    const int c = std::max(map.clusters, 1);
    for (std::size_t k = 0; k < map.size(); ++k)
        out.pixels[k] = c == 1 ? 0
                               : static_cast<std::uint8_t>(std::lround(
                                     255.0 * map.labels[k] / static_cast<double>(c - 1)));
    return out;
}

/// Recovers labels from an indexed label image: distinct gray values in
/// ascending order become clusters 0..c-1.
inline SegmentationMap segmentation_from_indexed(const GrayImage& img) {
    std::vector<int> level_to_label(256, -1);
    std::vector<bool> present(256, false);
    for (std::uint8_t p : img.pixels) present[p] = true;
    int c = 0;
    for (int level = 0; level < 256; ++level)
        if (present[level]) level_to_label[level] = c++;
    SegmentationMap map(img.width, img.height, c);
    for (std::size_t k = 0; k < img.size(); ++k) map.labels[k] = level_to_label[img.pixels[k]];
    return map;
}

}  // namespace kwsfcm

#endif
