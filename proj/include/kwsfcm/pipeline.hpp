#ifndef KWSFCM_PIPELINE_HPP
#define KWSFCM_PIPELINE_HPP

#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kwsfcm/clustering.hpp"
#include "kwsfcm/image.hpp"
#include "kwsfcm/metrics.hpp"
#include "kwsfcm/noise.hpp"

namespace kwsfcm {

enum class Algo { kwsfcm, fcm, kfcm_s };

inline Algo algo_from_string(const std::string& name) {
    if (name == "kwsfcm") return Algo::kwsfcm;
    if (name == "fcm") return Algo::fcm;
    if (name == "kfcm_s") return Algo::kfcm_s;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

inline const char* to_string(Algo algo) {
    switch (algo) {
        case Algo::kwsfcm: return "kwsfcm";
        case Algo::fcm: return "fcm";
        case Algo::kfcm_s: return "kfcm_s";
    }
    return "?";
}

inline SegmentationResult run_algorithm(Algo algo, const GrayImage& img, const ClusterParams& cp,
                                        const KernelParams& kp, const SusanParams& sp) {
    switch (algo) {
        case Algo::fcm: return fcm_segment(img, cp);
        case Algo::kfcm_s: return kfcm_s_segment(img, cp, kp);
        case Algo::kwsfcm: return kwsfcm_segment(img, cp, kp, sp);
    }
    throw std::logic_error("unreachable");
}

/// Fixed-precision decimal formatting, so identical results always produce
/// identical report bytes.
inline std::string format_double(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(const std::string& path, const KeyValues& kv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
}

inline void append_cluster_config(KeyValues& kv, Algo algo, const ClusterParams& cp,
                                  const KernelParams& kp, const SusanParams& sp) {
    kv.emplace_back("algo", to_string(algo));
    kv.emplace_back("c", std::to_string(cp.c));
    kv.emplace_back("m", format_double(cp.m));
    kv.emplace_back("alpha", format_double(cp.alpha));
    kv.emplace_back("epsilon", format_double(cp.epsilon));
    kv.emplace_back("max_iter", std::to_string(cp.max_iter));
    kv.emplace_back("init", cp.init == InitMode::equispaced ? "equispaced" : "seeded_random");
    kv.emplace_back("init.seed", std::to_string(cp.seed));
    kv.emplace_back("damping", cp.use_damping ? "1" : "0");
    kv.emplace_back("kernel.kind", to_string(kp.kind));
    kv.emplace_back("kernel.sigma", format_double(kp.sigma));
    kv.emplace_back("kernel.a", format_double(kp.a));
    kv.emplace_back("kernel.b", format_double(kp.b));
    kv.emplace_back("kernel.degree", std::to_string(kp.p));
    kv.emplace_back("susan.t", format_double(resolved(sp).t));
    kv.emplace_back("susan.min_ratio", format_double(sp.min_ratio));
    kv.emplace_back("susan.max_dev", format_double(sp.max_dev));
    kv.emplace_back("susan.exponent", std::to_string(sp.exponent));
    kv.emplace_back("susan.weight_mode", to_string(sp.weight_mode));
}

inline void write_trace_csv(const std::string& path, const SolveTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "iteration,objective";
    const int c = trace.iterations.empty() ? 0 : static_cast<int>(trace.iterations.front().centroids.size());
    for (int i = 0; i < c; ++i) out << ",v" << (i + 1);
    out << "\n";
    for (std::size_t it = 0; it < trace.iterations.size(); ++it) {
        out << (it + 1) << "," << format_double(trace.iterations[it].objective);
        for (double v : trace.iterations[it].centroids) out << "," << format_double(v);
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Experiment pipeline: clean reference -> noise -> segment -> evaluate
// ---------------------------------------------------------------------------

struct PipelineConfig {
    Algo algo = Algo::kwsfcm;
    ClusterParams cluster;
    KernelParams kernel;
    SusanParams susan;
    EqfParams eqf;
    NoiseSpec noise;
    int runs = 1;
    double entropy_log_base = std::numbers::e;
};

struct PipelineRun {
    std::uint64_t seed = 0;
    double sa = 0.0;
    double entropy = 0.0;        // E on the noisy input the algorithm saw
    double entropy_clean = 0.0;  // E on the clean image, same regions
    std::optional<double> eqf;   // undefined when the rendered map has no edges
    int iterations = 0;
    bool converged = false;
};

struct PipelineOutcome {
    SegmentationResult reference;  // classical FCM on the clean image
    std::vector<PipelineRun> runs;
};

/// The experimental protocol: the reference map is classical FCM on the
/// clean image; each run injects seeded noise (seed = base + run index),
/// segments it with the configured algorithm, and scores SA / E / EQF.
inline PipelineOutcome run_pipeline(const GrayImage& clean, const PipelineConfig& config) {
    if (config.runs < 1) throw std::invalid_argument("pipeline needs at least one run");
    PipelineOutcome outcome;
    outcome.reference = fcm_segment(clean, config.cluster);
    outcome.runs.resize(config.runs);

    // Runs are independent; each is seeded by run index so any schedule
    // produces the same table.
    std::mutex failure_mutex;
    std::exception_ptr failure;
    parallel_for(0, config.runs, [&](int r) {
        try {
            PipelineRun& run = outcome.runs[r];
            NoiseSpec spec = config.noise;
            spec.seed = config.noise.seed + static_cast<std::uint64_t>(r);
            run.seed = spec.seed;

            const GrayImage noisy = spec.level > 0.0 || spec.kind == NoiseKind::poisson
                                        ? add_noise(clean, spec)
                                        : clean;
            const SegmentationResult seg =
                run_algorithm(config.algo, noisy, config.cluster, config.kernel, config.susan);

            run.sa = segmentation_accuracy(seg.map, outcome.reference.map);
            run.entropy = entropy_measure(noisy, seg.map, config.entropy_log_base).combined;
            run.entropy_clean = entropy_measure(clean, seg.map, config.entropy_log_base).combined;
            run.iterations = seg.trace.iteration_count();
            run.converged = seg.trace.converged;
            try {
                run.eqf = eqf(render_by_centroids(seg.map, seg.centroids), config.eqf).eqf;
            } catch (const NoEdges&) {
                run.eqf.reset();
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return outcome;
}

struct Aggregate {
    double mean = 0.0, min = 0.0, max = 0.0;
    int count = 0;
};

template <class Getter>
Aggregate aggregate_runs(const std::vector<PipelineRun>& runs, Getter&& get) {
    Aggregate agg;
    for (const PipelineRun& run : runs) {
        const std::optional<double> v = get(run);
        if (!v) continue;
        if (agg.count == 0) {
            agg.min = agg.max = *v;
        } else {
            agg.min = std::min(agg.min, *v);
            agg.max = std::max(agg.max, *v);
        }
        agg.mean += *v;
        ++agg.count;
    }
    if (agg.count > 0) agg.mean /= agg.count;
    return agg;
}

inline void append_aggregate(KeyValues& kv, const std::string& name, const Aggregate& agg) {
    kv.emplace_back(name + ".mean", format_double(agg.mean));
    kv.emplace_back(name + ".min", format_double(agg.min));
    kv.emplace_back(name + ".max", format_double(agg.max));
}

inline KeyValues pipeline_report(const PipelineConfig& config, const PipelineOutcome& outcome) {
    KeyValues kv;
    append_cluster_config(kv, config.algo, config.cluster, config.kernel, config.susan);
    kv.emplace_back("noise.kind", to_string(config.noise.kind));
    kv.emplace_back("noise.level", format_double(config.noise.level));
    kv.emplace_back("noise.seed", std::to_string(config.noise.seed));
    kv.emplace_back("eqf.window", std::to_string(config.eqf.window));
    kv.emplace_back("eqf.alpha", format_double(config.eqf.alpha_k));
    kv.emplace_back("eqf.gamma", format_double(config.eqf.gamma));
    kv.emplace_back("eqf.threshold", format_double(config.eqf.threshold));
    kv.emplace_back("entropy.log_base", format_double(config.entropy_log_base));
    kv.emplace_back("runs", std::to_string(config.runs));

    append_aggregate(kv, "sa", aggregate_runs(outcome.runs, [](const PipelineRun& r) {
                         return std::optional<double>(r.sa);
                     }));
    append_aggregate(kv, "entropy", aggregate_runs(outcome.runs, [](const PipelineRun& r) {
                         return std::optional<double>(r.entropy);
                     }));
    append_aggregate(kv, "entropy_clean", aggregate_runs(outcome.runs, [](const PipelineRun& r) {
                         return std::optional<double>(r.entropy_clean);
                     }));
    const Aggregate eqf_agg =
        aggregate_runs(outcome.runs, [](const PipelineRun& r) { return r.eqf; });
    append_aggregate(kv, "eqf", eqf_agg);
    kv.emplace_back("eqf.defined_runs", std::to_string(eqf_agg.count));

    bool all_converged = true;
    int max_iterations = 0;
    for (const PipelineRun& run : outcome.runs) {
        all_converged = all_converged && run.converged;
        max_iterations = std::max(max_iterations, run.iterations);
    }
    kv.emplace_back("convergence.all", all_converged ? "1" : "0");
    kv.emplace_back("convergence.max_iterations", std::to_string(max_iterations));
    return kv;
}

inline void write_runs_csv(const std::string& path, const std::vector<PipelineRun>& runs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "run,seed,sa,entropy,entropy_clean,eqf,iterations,converged\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const PipelineRun& run = runs[r];
        out << (r + 1) << "," << run.seed << "," << format_double(run.sa) << ","
            << format_double(run.entropy) << "," << format_double(run.entropy_clean) << ","
            << (run.eqf ? format_double(*run.eqf) : std::string("undefined")) << ","
            << run.iterations << "," << (run.converged ? 1 : 0) << "\n";
    }
}

}  // namespace kwsfcm

#endif
