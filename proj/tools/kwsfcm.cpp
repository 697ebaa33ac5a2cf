// Command-line front end for the KWSFCM noisy-image segmentation toolkit:
// noise injection, segmentation (gray / color / multi-level via --c),
// evaluation metrics, and the noise->segment->evaluate experiment pipeline.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kwsfcm/kwsfcm.hpp"

namespace fs = std::filesystem;
using namespace kwsfcm;

namespace {

struct AlgoOptions {
    ClusterParams cluster;
    KernelParams kernel;
    SusanParams susan;
    EqfParams eqf;
    std::string algo = "kwsfcm";
    std::string init = "equispaced";
    std::string kernel_kind = "gaussian_rbf";
    std::string weight_mode = "circular";
    bool no_damping = false;
    double entropy_base = std::numbers::e;

    Algo resolve() {
        cluster.init = init == "seeded_random" ? InitMode::seeded_random : InitMode::equispaced;
        if (init != "equispaced" && init != "seeded_random")
            throw CLI::ValidationError("--init", "must be equispaced or seeded_random");
        cluster.use_damping = !no_damping;
        kernel.kind = kernel_kind_from_string(kernel_kind);
        susan.weight_mode = weight_mode_from_string(weight_mode);
        cluster.validate();
        kernel.validate();
        susan.validate();
        eqf.validate();
        return algo_from_string(algo);
    }
};

void add_algo_flags(CLI::App* cmd, AlgoOptions& o) {
    cmd->add_option("--algo", o.algo, "kwsfcm | fcm | kfcm_s");
    cmd->add_option("--c", o.cluster.c, "cluster count (3-level vs 5-level segmentation is just --c)");
    cmd->add_option("--m", o.cluster.m, "fuzzifier");
    cmd->add_option("--alpha", o.cluster.alpha, "neighbor-term weight");
    cmd->add_option("--epsilon", o.cluster.epsilon, "centroid-movement stop threshold");
    cmd->add_option("--max-iter", o.cluster.max_iter, "iteration cap");
    cmd->add_option("--init", o.init, "equispaced | seeded_random");
    cmd->add_option("--init-seed", o.cluster.seed, "seed for seeded_random init");
    cmd->add_flag("--no-damping", o.no_damping, "run with s(k) = 1 (weighted-mean-only objective)");
    cmd->add_option("--kernel-kind", o.kernel_kind, "gaussian_rbf | polynomial");
    cmd->add_option("--kernel-sigma", o.kernel.sigma, "RBF bandwidth");
    cmd->add_option("--kernel-a", o.kernel.a, "RBF inner exponent");
    cmd->add_option("--kernel-b", o.kernel.b, "RBF outer exponent");
    cmd->add_option("--kernel-degree", o.kernel.p, "polynomial degree");
    cmd->add_option("--t", o.susan.t, "SUSAN intensity scale (default: solved from --min-ratio)");
    cmd->add_option("--min-ratio", o.susan.min_ratio, "minimum similarity response");
    cmd->add_option("--max-dev", o.susan.max_dev, "full-scale deviation");
    cmd->add_option("--exponent", o.susan.exponent, "deviation exponent (even)");
    cmd->add_option("--weight-mode", o.weight_mode, "circular | uniform | cartesian");
}

void add_eqf_flags(CLI::App* cmd, AlgoOptions& o) {
    cmd->add_option("--eqf-window", o.eqf.window, "homogeneity window side");
    cmd->add_option("--eqf-alpha", o.eqf.alpha_k, "threshold scale");
    cmd->add_option("--eqf-gamma", o.eqf.gamma, "gamma lookup value");
    cmd->add_option("--eqf-threshold", o.eqf.threshold, "blur threshold");
    cmd->add_option("--eqf-levels", o.eqf.levels, "gray-level range");
    cmd->add_option("--entropy-base", o.entropy_base, "entropy log base");
}

// Flat `key = value` config, '#' comments. Keys are long option names with
// the dashes dropped, dots and dashes interchangeable (kernel.sigma and
// kernel-sigma both map to --kernel-sigma). Command-line flags override by
// coming later in the token stream.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        std::replace(key.begin(), key.end(), '.', '-');
        if (value == "true") {
            tokens.push_back("--" + key);
        } else {
            tokens.push_back("--" + key);
            tokens.push_back(value);
        }
    }
    return tokens;
}

SolveTrace run_and_write(Algo algo, const GrayImage& img, AlgoOptions& o, const fs::path& dir,
                         const std::string& suffix, GrayImage* rendered_out) {
    SegmentationResult result = run_algorithm(algo, img, o.cluster, o.kernel, o.susan);
    save_pgm(render_labels(result.map), (dir / ("labels" + suffix + ".pgm")).string());
    GrayImage rendered = render_by_centroids(result.map, result.centroids);
    save_pgm(rendered, (dir / ("rendered" + suffix + ".pgm")).string());
    write_trace_csv((dir / ("trace" + suffix + ".csv")).string(), result.trace);
    if (rendered_out) *rendered_out = std::move(rendered);

    KeyValues kv;
    append_cluster_config(kv, algo, o.cluster, o.kernel, o.susan);
    kv.emplace_back("iterations", std::to_string(result.trace.iteration_count()));
    kv.emplace_back("converged", result.trace.converged ? "1" : "0");
    kv.emplace_back("objective_increased", result.trace.objective_increased ? "1" : "0");
    for (std::size_t i = 0; i < result.centroids.size(); ++i)
        kv.emplace_back("centroid." + std::to_string(i + 1), format_double(result.centroids[i]));
    write_key_values((dir / ("report" + suffix + ".txt")).string(), kv);
    return result.trace;
}

int cmd_noise(const std::string& in, const std::string& out, const std::string& kind, double level,
              std::uint64_t seed) {
    NoiseSpec spec{noise_kind_from_string(kind), level, seed};
    GrayImage img = load_gray(in);
    save_pgm(add_noise(img, spec), out);
    KeyValues kv;
    kv.emplace_back("noise.kind", to_string(spec.kind));
    kv.emplace_back("noise.level", format_double(spec.level));
    kv.emplace_back("noise.seed", std::to_string(spec.seed));
    kv.emplace_back("input", in);
    write_key_values(out + ".meta", kv);
    return 0;
}

int cmd_segment(const std::string& in, const std::string& outdir, AlgoOptions& o,
                const std::string& dump_damping) {
    const Algo algo = o.resolve();
    GrayImage img = load_gray(in);
    fs::create_directories(outdir);
    run_and_write(algo, img, o, outdir, "", nullptr);
    if (!dump_damping.empty()) {
        NeighborhoodField field = damping_field(img, build_mask(o.susan.weight_mode), o.susan);
        save_pgm(damping_to_pgm(field), dump_damping);
    }
    return 0;
}

int cmd_segment_color(const std::string& in, const std::string& outdir, AlgoOptions& o) {
    const Algo algo = o.resolve();
    ColorImage img = load_color(in);
    fs::create_directories(outdir);
    ColorImage rendered;
    run_and_write(algo, img.red, o, outdir, "_r", &rendered.red);
    run_and_write(algo, img.green, o, outdir, "_g", &rendered.green);
    run_and_write(algo, img.blue, o, outdir, "_b", &rendered.blue);
    save_ppm(rendered, (fs::path(outdir) / "rendered.ppm").string());
    return 0;
}

int cmd_eval(const std::string& seg_path, const std::string& sa_ref, bool entropy,
             const std::string& image_path, bool want_eqf, const std::string& rendered_path,
             const std::string& dump_edges, const std::string& report_path, AlgoOptions& o) {
    KeyValues kv;
    const SegmentationMap seg = segmentation_from_indexed(load_gray(seg_path));
    kv.emplace_back("segmentation", seg_path);
    kv.emplace_back("clusters", std::to_string(seg.clusters));

    if (!sa_ref.empty()) {
        const SegmentationMap ref = segmentation_from_indexed(load_gray(sa_ref));
        kv.emplace_back("sa", format_double(segmentation_accuracy(seg, ref)));
    }
    if (entropy) {
        if (image_path.empty()) throw CLI::ValidationError("--entropy", "requires --image");
        const EntropyReport er = entropy_measure(load_gray(image_path), seg, o.entropy_base);
        kv.emplace_back("entropy.region", format_double(er.region_entropy));
        kv.emplace_back("entropy.layout", format_double(er.layout_entropy));
        kv.emplace_back("entropy.e", format_double(er.combined));
        for (std::size_t j = 0; j < er.regions.size(); ++j) {
            kv.emplace_back("entropy.region" + std::to_string(j) + ".size",
                            std::to_string(er.regions[j].size));
            kv.emplace_back("entropy.region" + std::to_string(j) + ".h",
                            format_double(er.regions[j].entropy));
        }
    }
    if (want_eqf) {
        if (rendered_path.empty()) throw CLI::ValidationError("--eqf", "requires --rendered");
        o.eqf.validate();
        const EqfReport r = eqf(load_gray(rendered_path), o.eqf);
        kv.emplace_back("eqf.edge_count", std::to_string(r.edge_count));
        kv.emplace_back("eqf.blur_count", std::to_string(r.blur_count));
        kv.emplace_back("eqf.blur_ratio", format_double(r.blur_ratio));
        kv.emplace_back("eqf.value", format_double(r.eqf));
        if (!dump_edges.empty()) save_pgm(r.edges, dump_edges);
    }

    for (const auto& [key, value] : kv) std::cout << key << " = " << value << "\n";
    if (!report_path.empty()) write_key_values(report_path, kv);
    return 0;
}

int cmd_pipeline(const std::string& in, const std::string& outdir, AlgoOptions& o,
                 const std::string& noise_kind, double noise_level, std::uint64_t seed, int runs) {
    PipelineConfig config;
    config.algo = o.resolve();
    config.cluster = o.cluster;
    config.kernel = o.kernel;
    config.susan = o.susan;
    config.eqf = o.eqf;
    config.noise = {noise_kind_from_string(noise_kind), noise_level, seed};
    config.runs = runs;
    config.entropy_log_base = o.entropy_base;

    GrayImage clean = load_gray(in);
    fs::create_directories(outdir);
    PipelineOutcome outcome = run_pipeline(clean, config);

    save_pgm(render_labels(outcome.reference.map), (fs::path(outdir) / "reference_labels.pgm").string());
    write_key_values((fs::path(outdir) / "report.txt").string(), pipeline_report(config, outcome));
    write_runs_csv((fs::path(outdir) / "runs.csv").string(), outcome.runs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    // Expand --config FILE into option tokens placed before the user's own
    // flags, so explicit flags win.
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string file;
            std::size_t remove = 0;
            if (args[i] == "--config" && i + 1 < args.size()) {
                file = args[i + 1];
                remove = 2;
            } else if (args[i].rfind("--config=", 0) == 0) {
                file = args[i].substr(9);
                remove = 1;
            }
            if (remove == 0) continue;
            const std::vector<std::string> extra = config_tokens(file);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + remove));
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), extra.begin(), extra.end());
            break;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"KWSFCM noisy-image segmentation toolkit"};
    app.require_subcommand(1);

    AlgoOptions opt;

    // noise
    std::string n_in, n_out, n_kind = "salt_pepper";
    double n_level = 0.1;
    std::uint64_t n_seed = 0;
    CLI::App* noise_cmd = app.add_subcommand("noise", "inject seeded noise into a PGM image");
    noise_cmd->add_option("--kind", n_kind, "salt_pepper | gaussian | poisson | speckle | rician");
    noise_cmd->add_option("--level", n_level, "noise level (per-kind convention)");
    noise_cmd->add_option("--seed", n_seed, "noise seed");
    noise_cmd->add_option("input", n_in, "clean PGM")->required();
    noise_cmd->add_option("output", n_out, "noisy PGM")->required();

    // segment
    std::string s_in, s_out, s_dump_damping;
    CLI::App* segment_cmd = app.add_subcommand("segment", "segment a grayscale image");
    add_algo_flags(segment_cmd, opt);
    segment_cmd->add_option("--dump-damping", s_dump_damping, "write the damping field as a PGM heat-map");
    segment_cmd->add_option("input", s_in, "input PGM")->required();
    segment_cmd->add_option("outdir", s_out, "output directory")->required();

    // segment-color
    std::string c_in, c_out;
    CLI::App* color_cmd = app.add_subcommand("segment-color", "segment a PPM image channel by channel");
    add_algo_flags(color_cmd, opt);
    color_cmd->add_option("input", c_in, "input PPM")->required();
    color_cmd->add_option("outdir", c_out, "output directory")->required();

    // eval
    std::string e_seg, e_sa, e_image, e_rendered, e_dump_edges, e_report;
    bool e_entropy = false, e_eqf = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a segmentation (key = value report)");
    eval_cmd->add_option("segmentation", e_seg, "indexed label PGM (as written by segment)")->required();
    eval_cmd->add_option("--sa", e_sa, "reference label PGM; report segmentation accuracy");
    eval_cmd->add_flag("--entropy", e_entropy, "report the entropy measure (needs --image)");
    eval_cmd->add_option("--image", e_image, "image the segmentation was computed from");
    eval_cmd->add_flag("--eqf", e_eqf, "report the edge quality factor (needs --rendered)");
    eval_cmd->add_option("--rendered", e_rendered, "centroid-rendered segmentation PGM");
    eval_cmd->add_option("--dump-edges", e_dump_edges, "write the final edge bitmap as a PGM");
    eval_cmd->add_option("--report", e_report, "also write the report to this file");
    add_eqf_flags(eval_cmd, opt);

    // pipeline
    std::string p_in, p_out, p_noise_kind = "salt_pepper";
    double p_noise_level = 0.2;
    std::uint64_t p_seed = 0;
    int p_runs = 1;
    CLI::App* pipeline_cmd =
        app.add_subcommand("pipeline", "clean reference -> noise -> segment -> SA/E/EQF over seeded runs");
    add_algo_flags(pipeline_cmd, opt);
    add_eqf_flags(pipeline_cmd, opt);
    pipeline_cmd->add_option("--noise-kind", p_noise_kind, "noise family");
    pipeline_cmd->add_option("--noise-level", p_noise_level, "noise level");
    pipeline_cmd->add_option("--seed", p_seed, "base seed; run r uses seed + r");
    pipeline_cmd->add_option("--runs", p_runs, "number of seeded runs");
    pipeline_cmd->add_option("input", p_in, "clean PGM")->required();
    pipeline_cmd->add_option("outdir", p_out, "output directory")->required();

    // Config-file tokens and explicit flags may repeat; the last one wins.
    for (CLI::App* sub : {noise_cmd, segment_cmd, color_cmd, eval_cmd, pipeline_cmd})
        for (CLI::Option* option : sub->get_options())
            option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*noise_cmd) return cmd_noise(n_in, n_out, n_kind, n_level, n_seed);
        if (*segment_cmd) return cmd_segment(s_in, s_out, opt, s_dump_damping);
        if (*color_cmd) return cmd_segment_color(c_in, c_out, opt);
        if (*eval_cmd)
            return cmd_eval(e_seg, e_sa, e_entropy, e_image, e_eqf, e_rendered, e_dump_edges,
                            e_report, opt);
        if (*pipeline_cmd)
            return cmd_pipeline(p_in, p_out, opt, p_noise_kind, p_noise_level, p_seed, p_runs);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
