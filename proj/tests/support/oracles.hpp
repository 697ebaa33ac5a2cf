#ifndef KWSFCM_TESTS_ORACLES_HPP
#define KWSFCM_TESTS_ORACLES_HPP

// Independent reference computations the tests check the library against.
// Everything here is written from the textbook definitions, on purpose
// sharing no code with the implementation under test.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kwsfcm/image.hpp"

namespace oracles {

struct FcmResult {
    std::vector<double> centroids;
    std::vector<int> labels;
    int iterations = 0;
};

/// Plain fuzzy c-means on raw intensities: memberships from squared
/// Euclidean distances, centroids as u^m-weighted means, stop when the
/// largest centroid move drops below epsilon.
inline FcmResult classical_fcm(const std::vector<double>& x, int c, double m, double epsilon,
                               int max_iter) {
    const int n = static_cast<int>(x.size());
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    std::vector<double> v(c);
    for (int i = 0; i < c; ++i) v[i] = lo + (i + 0.5) * (hi - lo) / c;

    std::vector<double> u(static_cast<std::size_t>(n) * c);
    FcmResult out;
    for (int iter = 0; iter < max_iter; ++iter) {
        ++out.iterations;
        for (int k = 0; k < n; ++k) {
            std::vector<double> d(c);
            int zeros = 0;
            for (int i = 0; i < c; ++i) {
                d[i] = (x[k] - v[i]) * (x[k] - v[i]);
                if (d[i] == 0.0) ++zeros;
            }
            for (int i = 0; i < c; ++i) {
                if (zeros > 0) {
                    u[k * c + i] = d[i] == 0.0 ? 1.0 / zeros : 0.0;
                    continue;
                }
                double sum = 0.0;
                for (int j = 0; j < c; ++j) sum += std::pow(d[i] / d[j], 1.0 / (m - 1.0));
                u[k * c + i] = 1.0 / sum;
            }
        }
        double max_dv = 0.0;
        for (int i = 0; i < c; ++i) {
            double num = 0.0, den = 0.0;
            for (int k = 0; k < n; ++k) {
                const double w = std::pow(u[k * c + i], m);
                num += w * x[k];
                den += w;
            }
            const double vi = num / den;
            max_dv = std::max(max_dv, std::abs(vi - v[i]));
            v[i] = vi;
        }
        if (max_dv < epsilon) break;
    }
    out.centroids = v;
    out.labels.resize(n);
    for (int k = 0; k < n; ++k) {
        int best = 0;
        for (int i = 1; i < c; ++i)
            if (u[k * c + i] > u[k * c + best]) best = i;
        out.labels[k] = best;
    }
    return out;
}

/// Minimum of sum_i u_i^m d_i over the 2-cluster simplex sampled at `step`.
inline double simplex_grid_min(double d0, double d1, double m, double step = 0.01) {
    double best = 1e300;
    for (double u0 = 0.0; u0 <= 1.0 + 1e-12; u0 += step) {
        const double u1 = 1.0 - u0;
        best = std::min(best, std::pow(u0, m) * d0 + std::pow(u1, m) * d1);
    }
    return best;
}

/// Kernel FCM objective (alpha=0) at optimal memberships, for a centroid
/// grid search: J(v) = sum_k min-over-u of sum_i u^m (1 - K(x_k, v_i)).
inline double kernel_fcm_objective(const std::vector<double>& x, double v0, double v1, double m,
                                   double sigma) {
    double total = 0.0;
    for (double xk : x) {
        const double d0 = 1.0 - std::exp(-(xk - v0) * (xk - v0) / (sigma * sigma));
        const double d1 = 1.0 - std::exp(-(xk - v1) * (xk - v1) / (sigma * sigma));
        if (d0 == 0.0 || d1 == 0.0) continue;  // zero distance contributes zero at the optimum
        // closed-form optimum for two clusters, m=2: u0 = d1/(d0+d1)
        const double u0 = std::pow(1.0 / d0, 1.0 / (m - 1.0)) /
                          (std::pow(1.0 / d0, 1.0 / (m - 1.0)) + std::pow(1.0 / d1, 1.0 / (m - 1.0)));
        total += std::pow(u0, m) * d0 + std::pow(1.0 - u0, m) * d1;
    }
    return total;
}

}  // namespace oracles

#endif
