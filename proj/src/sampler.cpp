#include "pasguide/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "pasguide/errors.hpp"
#include "pasguide/parallel.hpp"

namespace pasguide {

void GuidanceConfig::validate() const {
    if (T < 1) throw InvalidInputError("GuidanceConfig: T must be >= 1");
    if (N < 1) throw InvalidInputError("GuidanceConfig: N must be >= 1");
    if (s < 0.0) throw InvalidInputError("GuidanceConfig: s must be non-negative");
    if (lambda_exp < 0.0 || lambda_ref < 0.0 || lambda_stru < 0.0) {
        throw InvalidInputError("GuidanceConfig: lambda weights must be non-negative");
    }
}

GuidanceContext make_guidance_context(const Image& y0, const Restorer& restorer,
                                      const GuidanceConfig& cfg) {
    cfg.validate();
    if (y0.channels() != 3) throw InvalidInputError("make_guidance_context: y0 must have 3 channels");
    GuidanceContext ctx;
    ctx.exposure = build_exposure_map(y0, cfg.exposure_base, cfg.exposure_amplitude);
    ctx.reflectance_ref = retinex_decompose(y0).reflectance;
    ctx.restorer = &restorer;
    ctx.cfg = cfg;
    return ctx;
}

GradientResult total_gradient(const Image& x0_hat, const GuidanceContext& ctx) {
    const GuidanceConfig& cfg = ctx.cfg;
    GradientResult result;
    result.grad = Image(x0_hat.height(), x0_hat.width(), x0_hat.channels(), 0.0);
    TraceRecord& rec = result.record;

    if (cfg.enable_exp) {
        rec.loss_exp = exposure_loss(x0_hat, ctx.exposure);
        result.grad = add_scaled(result.grad, exposure_grad(x0_hat, ctx.exposure), cfg.lambda_exp);
    }
    if (cfg.enable_ref) {
        rec.loss_ref = reflectance_loss(x0_hat, ctx.reflectance_ref);
        result.grad = add_scaled(
            result.grad, reflectance_grad(x0_hat, ctx.reflectance_ref, cfg.retinex_grad_mode),
            cfg.lambda_ref);
    }
    if (cfg.enable_stru) {
        const InjectionResult inj = cfg.injection_mode == InjectionMode::Sasi
                                        ? structural_loss(x0_hat, *ctx.restorer)
                                        : mse_injection_loss(x0_hat, *ctx.restorer);
        rec.loss_stru = inj.loss;
        result.grad = add_scaled(result.grad, structural_grad(x0_hat, inj.target), cfg.lambda_stru);
    }
    rec.loss_total =
        cfg.lambda_exp * rec.loss_exp + cfg.lambda_ref * rec.loss_ref + cfg.lambda_stru * rec.loss_stru;
    double norm2 = 0.0;
    for (double v : result.grad.data()) norm2 += v * v;
    rec.grad_norm = std::sqrt(norm2);
    return result;
}

RunResult run_pasdiff(const Image& y0, const NoisePredictor& predictor, const Restorer& restorer,
                      const GuidanceConfig& cfg, const NoiseSchedule& sched, Rng& rng) {
    cfg.validate();
    if (y0.channels() != 3) throw InvalidInputError("run_pasdiff: y0 must have 3 channels");
    if (cfg.T != sched.timesteps()) {
        throw InvalidInputError("run_pasdiff: cfg.T does not match the schedule");
    }

    const GuidanceContext ctx = make_guidance_context(y0, restorer, cfg);
    const int T = sched.timesteps();

    Image x = forward_sample(y0, T, normal_image(y0.height(), y0.width(), y0.channels(), rng), sched);

    RunResult result;
    long predictor_calls = 0;
    Image x0_hat;

    for (int t = T; t >= 1; --t) {
        int round = 0;
        try {
            Image eps_hat = predictor.predict(x, t, sched);
            ++predictor_calls;
            x0_hat = predict_x0(x, eps_hat, t, sched);
            const Image mu = reverse_mean(x, eps_hat, t, sched);
            const double variance = t == 1 ? 0.0 : sched.posterior_var(t);

            auto push_record = [&](GradientResult& gr, int inner) {
                gr.record.t = t;
                gr.record.inner = inner;
                gr.record.predictor_calls = predictor_calls;
                if (!std::isfinite(gr.record.loss_total) || !std::isfinite(gr.record.grad_norm)) {
                    throw std::runtime_error("non-finite loss or gradient");
                }
                result.trace.push_back(gr.record);
            };

            Image g;
            if (cfg.N == 1) {
                GradientResult gr = total_gradient(x0_hat, ctx);
                push_record(gr, 0);
                g = std::move(gr.grad);
            } else {
                for (round = 0; round < cfg.N - 1; ++round) {
                    GradientResult gr = total_gradient(x0_hat, ctx);
                    push_record(gr, round);
                    g = std::move(gr.grad);
                    x = guided_transition(mu, variance, g, cfg.s, rng);
                    eps_hat = predictor.predict(x, t, sched);
                    ++predictor_calls;
                    x0_hat = predict_x0(x, eps_hat, t, sched);
                }
            }
            // The step to t-1 reuses the round's last gradient.
            x = guided_transition(mu, variance, g, cfg.s, rng);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_pasdiff: error at timestep " + std::to_string(t) + ", round " +
                                     std::to_string(round) + ": " + e.what());
        }
    }

    result.output = clamp01(x0_hat);
    return result;
}

std::vector<BatchItem> restore_batch(const std::vector<Image>& inputs, const NoisePredictor& predictor,
                                     const Restorer& restorer, const GuidanceConfig& cfg,
                                     const NoiseSchedule& sched, const std::vector<std::uint64_t>& seeds,
                                     int threads) {
    if (inputs.size() != seeds.size()) throw InvalidInputError("restore_batch: one seed per input required");
    if (!inputs.empty()) {
        for (const auto& img : inputs) {
            if (!img.same_shape(inputs.front())) throw InvalidInputError("restore_batch: uniform shapes required");
        }
    }
    std::vector<BatchItem> items(inputs.size());
    parallel_for(static_cast<int>(inputs.size()), threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        GuidanceConfig item_cfg = cfg;
        item_cfg.seed = seeds[idx];
        Rng rng(seeds[idx]);
        try {
            RunResult run = run_pasdiff(inputs[idx], predictor, restorer, item_cfg, sched, rng);
            items[idx].ok = true;
            items[idx].output = std::move(run.output);
            items[idx].trace = std::move(run.trace);
        } catch (const std::exception& e) {
            items[idx].ok = false;
            items[idx].error = e.what();
        }
    });
    return items;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("write_trace_csv: cannot open " + path);
    std::fprintf(fp, "t,inner,L_exp,L_ref,L_stru,L_total,grad_norm,predictor_calls\n");
    for (const auto& rec : trace) {
        std::fprintf(fp, "%d,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%ld\n", rec.t, rec.inner, rec.loss_exp,
                     rec.loss_ref, rec.loss_stru, rec.loss_total, rec.grad_norm, rec.predictor_calls);
    }
    std::fclose(fp);
}

}  // namespace pasguide
