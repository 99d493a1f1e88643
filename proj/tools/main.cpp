#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "pasguide/config.hpp"
#include "pasguide/degrade.hpp"
#include "pasguide/errors.hpp"
#include "pasguide/gradcheck.hpp"
#include "pasguide/image_io.hpp"
#include "pasguide/metrics.hpp"
#include "pasguide/parallel.hpp"
#include "pasguide/sampler.hpp"

namespace fs = std::filesystem;
using namespace pasguide;

namespace {

// Collects restore-style options so bench can reuse them. Flag values are
// applied over the config file, which is applied over defaults.
struct GuidanceFlags {
    int T = 0, N = 0;
    double s = 0.0, lambda_exp = 0.0, lambda_ref = 0.0, lambda_stru = 0.0;
    bool disable_exp = false, disable_ref = false, disable_stru = false;
    std::string injection, retinex_grad, predictor, gallery, reference, restorer;
    double unsharp_amount = 0.0, unsharp_sigma = 0.0;
    double beta_start = 0.0, beta_end = 0.0;
    double exposure_base = 0.0, exposure_amplitude = 0.0;

    std::map<std::string, CLI::Option*> opts;

    void add_to(CLI::App& cmd) {
        opts["T"] = cmd.add_option("--T", T, "diffusion timesteps");
        opts["N"] = cmd.add_option("--N", N, "gradient rounds per timestep");
        opts["s"] = cmd.add_option("--s", s, "guidance scale");
        opts["lambda_exp"] = cmd.add_option("--lambda-exp", lambda_exp, "exposure weight");
        opts["lambda_ref"] = cmd.add_option("--lambda-ref", lambda_ref, "reflectance weight");
        opts["lambda_stru"] = cmd.add_option("--lambda-stru", lambda_stru, "structural weight");
        opts["disable_exp"] = cmd.add_flag("--disable-exp", disable_exp, "drop the exposure term");
        opts["disable_ref"] = cmd.add_flag("--disable-ref", disable_ref, "drop the reflectance term");
        opts["disable_stru"] = cmd.add_flag("--disable-stru", disable_stru, "drop the structural term");
        opts["injection"] = cmd.add_option("--injection", injection, "structural injection: sasi|mse");
        opts["retinex_grad"] = cmd.add_option("--retinex-grad", retinex_grad, "reflectance gradient: frozen|full");
        opts["predictor"] = cmd.add_option("--predictor", predictor, "noise predictor: mixture|exact");
        opts["gallery"] = cmd.add_option("--gallery", gallery, "gallery directory for the mixture predictor");
        opts["reference"] = cmd.add_option("--reference", reference, "clean reference for the exact predictor");
        opts["restorer"] = cmd.add_option("--restorer", restorer, "restoration prior: identity|unsharp");
        opts["unsharp_amount"] = cmd.add_option("--unsharp-amount", unsharp_amount, "unsharp strength");
        opts["unsharp_sigma"] = cmd.add_option("--unsharp-sigma", unsharp_sigma, "unsharp blur sigma");
        opts["beta_start"] = cmd.add_option("--beta-start", beta_start, "first beta of the schedule");
        opts["beta_end"] = cmd.add_option("--beta-end", beta_end, "last beta of the schedule");
        opts["exposure_base"] = cmd.add_option("--exposure-base", exposure_base, "exposure map base");
        opts["exposure_amplitude"] =
            cmd.add_option("--exposure-amplitude", exposure_amplitude, "exposure map amplitude");
    }

    bool set(const char* name) const { return opts.at(name)->count() > 0; }

    void apply(RunConfig& cfg) const {
        GuidanceConfig& g = cfg.guidance;
        if (set("T")) g.T = T;
        if (set("N")) g.N = N;
        if (set("s")) g.s = s;
        if (set("lambda_exp")) g.lambda_exp = lambda_exp;
        if (set("lambda_ref")) g.lambda_ref = lambda_ref;
        if (set("lambda_stru")) g.lambda_stru = lambda_stru;
        if (disable_exp) g.enable_exp = false;
        if (disable_ref) g.enable_ref = false;
        if (disable_stru) g.enable_stru = false;
        if (set("injection")) g.injection_mode = parse_injection_mode(injection);
        if (set("retinex_grad")) g.retinex_grad_mode = parse_retinex_grad_mode(retinex_grad);
        if (set("exposure_base")) g.exposure_base = exposure_base;
        if (set("exposure_amplitude")) g.exposure_amplitude = exposure_amplitude;
        if (set("beta_start")) cfg.beta_start = beta_start;
        if (set("beta_end")) cfg.beta_end = beta_end;
        if (set("predictor")) cfg.predictor = predictor;
        if (set("gallery")) cfg.gallery = gallery;
        if (set("reference")) cfg.reference = reference;
        if (set("restorer")) cfg.restorer = restorer;
        if (set("unsharp_amount")) cfg.unsharp_amount = unsharp_amount;
        if (set("unsharp_sigma")) cfg.unsharp_sigma = unsharp_sigma;
    }
};

RunConfig base_config(const std::string& config_path, long seed, CLI::Option* seed_opt, int threads_flag) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (seed_opt->count() > 0) cfg.guidance.seed = static_cast<std::uint64_t>(seed);
    cfg.threads = cli::resolve_threads(threads_flag, cfg);
    return cfg;
}

int run_degrade(const std::string& in_dir, const std::string& out_dir, std::uint64_t seed, int count) {
    const auto inputs = cli::list_images(in_dir);
    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
    if (!manifest) throw IoError("cannot write manifest in " + out_dir);
    manifest << "filename,sigma,r,delta,q,alpha,gamma,seed\n";
    if (inputs.empty()) {
        std::fprintf(stderr, "warning: no images found in %s; wrote empty manifest\n", in_dir.c_str());
        return 0;
    }

    Rng rng(seed);
    const int pairs = count > 0 ? count : static_cast<int>(inputs.size());
    for (int i = 0; i < pairs; ++i) {
        const auto& src = inputs[static_cast<std::size_t>(i) % inputs.size()];
        const Image clean = load_image(src);
        const DegradationParams params = sample_params(rng);
        const Image degraded = apply_degradation(clean, params);

        char base[32];
        std::snprintf(base, sizeof base, "%04d", i);
        save_png(clean, (fs::path(out_dir) / (std::string(base) + "_clean.png")).string());
        save_png(degraded, (fs::path(out_dir) / (std::string(base) + "_degraded.png")).string());
        manifest << base << ',' << cli::format_g6(params.sigma) << ',' << cli::format_g6(params.down_factor)
                 << ',' << cli::format_g6(params.noise_std) << ',' << params.jpeg_quality << ','
                 << cli::format_g6(params.exposure) << ',' << cli::format_g6(params.gamma) << ','
                 << params.seed << '\n';
    }
    std::fprintf(stderr, "degrade: wrote %d pair(s) to %s\n", pairs, out_dir.c_str());
    return 0;
}

int run_restore(const RunConfig& cfg, const std::string& input, const std::string& output,
                std::string trace_path) {
    const Image y0 = load_image(input);
    const auto handle = cli::make_predictor(cfg);
    const auto restorer = cli::make_configured_restorer(cfg);
    const NoiseSchedule sched = make_schedule(cfg.guidance.T, cfg.beta_start, cfg.beta_end);

    Rng rng(cfg.guidance.seed);
    const RunResult result = run_pasdiff(y0, *handle.predictor, *restorer, cfg.guidance, sched, rng);

    save_png(result.output, output);
    if (trace_path.empty()) trace_path = output + ".trace.csv";
    write_trace_csv(result.trace, trace_path);
    std::fprintf(stderr, "restore: wrote %s and %s\n", output.c_str(), trace_path.c_str());
    return 0;
}

void write_histogram_csv(const Histogram& hist, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out << cli::format_g6(hist.edges[i]) << ',' << cli::format_g6(hist.edges[i + 1]) << ','
            << hist.counts[i] << '\n';
    }
}

int run_analyze(const std::string& in_dir, const std::string& out_prefix, const std::string& boxes_csv,
                int min_size, double denoise_sigma, int threads) {
    DatasetStats stats;
    int dropped_boxes = 0;
    if (boxes_csv.empty()) {
        stats = analyze_dataset(in_dir, denoise_sigma, threads);
    } else {
        const auto entries = read_boxes_csv(boxes_csv);
        std::map<std::string, std::vector<Box>> by_file;
        for (const auto& [name, box] : entries) by_file[name].push_back(box);
        std::vector<DatasetStats::Row> rows;
        int skipped = 0;
        for (const auto& [name, boxes] : by_file) {
            Image img;
            try {
                img = load_image((fs::path(in_dir) / name).string());
            } catch (const std::exception& e) {
                std::fprintf(stderr, "warning: skipping %s: %s\n", name.c_str(), e.what());
                ++skipped;
                continue;
            }
            const CropResult cropped = crop_faces(img, boxes, min_size);
            dropped_boxes += cropped.dropped;
            for (std::size_t k = 0; k < cropped.crops.size(); ++k) {
                rows.push_back(image_stats(cropped.crops[k], name + "#" + std::to_string(k), denoise_sigma));
            }
        }
        stats = aggregate_stats(std::move(rows), skipped);
    }

    std::ofstream out(out_prefix + "_stats.csv");
    if (!out) throw IoError("cannot write " + out_prefix + "_stats.csv");
    out << "filename,mean_intensity,mean_chroma,laplacian_variance\n";
    for (const auto& row : stats.rows) {
        out << row.filename << ',' << cli::format_g6(row.mean_intensity) << ','
            << cli::format_g6(row.mean_chroma) << ',' << cli::format_g6(row.laplacian_variance) << '\n';
    }
    write_histogram_csv(stats.intensity_hist, out_prefix + "_hist_intensity.csv");
    write_histogram_csv(stats.chroma_hist, out_prefix + "_hist_chroma.csv");
    write_histogram_csv(stats.lapvar_hist, out_prefix + "_hist_lapvar.csv");
    std::fprintf(stderr, "analyze: %d image(s), %d skipped, %d box(es) dropped\n", stats.files_read,
                 stats.files_skipped, dropped_boxes);
    return 0;
}

int run_bench(const RunConfig& cfg, const std::string& dataset_dir, const std::string& out_csv,
              const std::vector<int>& n_list) {
    std::vector<std::pair<std::string, std::string>> pairs;  // (clean, degraded)
    for (const auto& path : cli::list_images(dataset_dir)) {
        const std::string name = fs::path(path).filename().string();
        const auto pos = name.find("_clean.png");
        if (pos == std::string::npos) continue;
        const std::string degraded = (fs::path(dataset_dir) / (name.substr(0, pos) + "_degraded.png")).string();
        if (fs::exists(degraded)) pairs.emplace_back(path, degraded);
    }
    if (pairs.empty()) {
        std::fprintf(stderr, "bench: no *_clean.png / *_degraded.png pairs in %s\n", dataset_dir.c_str());
        return 1;
    }

    // With the exact predictor and no explicit reference, each pair's clean
    // image is the oracle.
    const bool per_pair_oracle = cfg.predictor == "exact" && cfg.reference.empty();
    cli::PredictorHandle handle;
    if (!per_pair_oracle) handle = cli::make_predictor(cfg);
    const auto restorer = cli::make_configured_restorer(cfg);
    const NoiseSchedule sched = make_schedule(cfg.guidance.T, cfg.beta_start, cfg.beta_end);

    std::ofstream out(out_csv);
    if (!out) throw IoError("cannot write " + out_csv);
    out << "filename,N,psnr_input,psnr_output,wall_ms,predictor_calls\n";

    struct Agg {
        double psnr_sum = 0.0, ms_sum = 0.0;
        long calls = 0;
        int count = 0;
    };
    std::map<int, Agg> aggregates;
    int failures = 0;

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Image clean = load_image(pairs[i].first);
        const Image degraded = load_image(pairs[i].second);
        const double psnr_in = psnr(degraded, clean);
        std::unique_ptr<NoisePredictor> oracle;
        if (per_pair_oracle) oracle = std::make_unique<ExactPredictor>(clean);
        const NoisePredictor& predictor = per_pair_oracle ? *oracle : *handle.predictor;
        for (int n : n_list) {
            GuidanceConfig g = cfg.guidance;
            g.N = n;
            g.seed = cfg.guidance.seed + i;
            CountingPredictor counting(predictor);
            Rng rng(g.seed);
            const auto start = std::chrono::steady_clock::now();
            try {
                const RunResult result = run_pasdiff(degraded, counting, *restorer, g, sched, rng);
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                const double psnr_out = psnr(result.output, clean);
                out << fs::path(pairs[i].second).filename().string() << ',' << n << ','
                    << cli::format_g6(psnr_in) << ',' << cli::format_g6(psnr_out) << ','
                    << cli::format_g6(ms) << ',' << counting.calls() << '\n';
                Agg& agg = aggregates[n];
                agg.psnr_sum += psnr_out;
                agg.ms_sum += ms;
                agg.calls += counting.calls();
                ++agg.count;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "bench: %s (N=%d) failed: %s\n", pairs[i].second.c_str(), n, e.what());
                ++failures;
            }
        }
    }
    for (const auto& [n, agg] : aggregates) {
        if (agg.count == 0) continue;
        out << "aggregate,"
            << n << ",," << cli::format_g6(agg.psnr_sum / agg.count) << ','
            << cli::format_g6(agg.ms_sum / agg.count) << ',' << agg.calls / agg.count << '\n';
    }
    std::fprintf(stderr, "bench: %zu pair(s), %d failure(s), report %s\n", pairs.size(), failures,
                 out_csv.c_str());
    return 0;
}

int run_gradcheck(std::uint64_t seed) {
    const auto results = gradcheck::run_suite(seed);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%-36s max_rel_err=%.3e tol=%.0e %s\n", r.name.c_str(), r.max_rel_err, r.tolerance,
                    r.pass ? "PASS" : "FAIL");
        if (!r.pass) ++failures;
    }
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guided-diffusion low-light face restoration toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    long seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "flat key = value config file")->expected(1);
    CLI::Option* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "worker threads (env PASGUIDE_THREADS as fallback)");

    // degrade
    auto* degrade_cmd = app.add_subcommand("degrade", "synthesize paired low-light degradations");
    std::string deg_in, deg_out;
    int deg_count = 0;
    degrade_cmd->add_option("--input", deg_in, "directory of clean images")->required();
    degrade_cmd->add_option("--output", deg_out, "output directory")->required();
    degrade_cmd->add_option("--count", deg_count, "pairs to emit (0 = one per input image)");

    // restore
    auto* restore_cmd = app.add_subcommand("restore", "run the guided sampler on one image");
    std::string res_in, res_out, res_trace;
    GuidanceFlags res_flags;
    restore_cmd->add_option("--input", res_in, "degraded image")->required();
    restore_cmd->add_option("--output", res_out, "restored PNG path")->required();
    restore_cmd->add_option("--trace", res_trace, "trace CSV path (default <output>.trace.csv)");
    res_flags.add_to(*restore_cmd);

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "dataset degradation statistics");
    std::string ana_in, ana_prefix, ana_boxes;
    int ana_min_size = 0;
    double ana_denoise = kDefaultDenoiseSigma;
    analyze_cmd->add_option("--input", ana_in, "directory of images")->required();
    analyze_cmd->add_option("--output", ana_prefix, "output CSV prefix")->required();
    analyze_cmd->add_option("--boxes", ana_boxes, "crop boxes CSV (filename,x_min,y_min,x_max,y_max)");
    analyze_cmd->add_option("--min-size", ana_min_size, "minimum crop side in pixels");
    analyze_cmd->add_option("--denoise-sigma", ana_denoise, "blur before the Laplacian");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "speed/quality trade-off over a paired dataset");
    std::string bench_dir, bench_out = "bench.csv", bench_n = "1,2,4";
    GuidanceFlags bench_flags;
    bench_cmd->add_option("--input", bench_dir, "directory of *_clean/*_degraded pairs")->required();
    bench_cmd->add_option("--output", bench_out, "report CSV path");
    bench_cmd->add_option("--N-list", bench_n, "comma-separated gradient-round counts");
    bench_flags.add_to(*bench_cmd);

    // gradcheck
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference checks of every gradient");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*degrade_cmd) {
            RunConfig cfg = base_config(config_path, seed, seed_opt, threads);
            return run_degrade(deg_in, deg_out, cfg.guidance.seed, deg_count);
        }
        if (*restore_cmd) {
            RunConfig cfg = base_config(config_path, seed, seed_opt, threads);
            res_flags.apply(cfg);
            return run_restore(cfg, res_in, res_out, res_trace);
        }
        if (*analyze_cmd) {
            RunConfig cfg = base_config(config_path, seed, seed_opt, threads);
            return run_analyze(ana_in, ana_prefix, ana_boxes, ana_min_size, ana_denoise, cfg.threads);
        }
        if (*bench_cmd) {
            RunConfig cfg = base_config(config_path, seed, seed_opt, threads);
            bench_flags.apply(cfg);
            std::vector<int> n_list;
            std::stringstream ss(bench_n);
            std::string item;
            while (std::getline(ss, item, ',')) n_list.push_back(std::stoi(item));
            if (n_list.empty()) throw InvalidInputError("--N-list is empty");
            return run_bench(cfg, bench_dir, bench_out, n_list);
        }
        if (*gradcheck_cmd) {
            RunConfig cfg = base_config(config_path, seed, seed_opt, threads);
            return run_gradcheck(cfg.guidance.seed);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
