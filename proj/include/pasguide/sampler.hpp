#ifndef PASGUIDE_SAMPLER_HPP
#define PASGUIDE_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pasguide/diffusion.hpp"
#include "pasguide/image.hpp"
#include "pasguide/photometric.hpp"
#include "pasguide/predictors.hpp"
#include "pasguide/sasi.hpp"

namespace pasguide {

enum class InjectionMode { Sasi, Mse };

struct GuidanceConfig {
    int T = kDefaultTimesteps;
    int N = 2;            // gradient rounds per timestep
    double s = 1.0;       // guidance scale
    double lambda_exp = 1200.0;
    double lambda_ref = 0.03;
    double lambda_stru = 10000.0;
    bool enable_exp = true;
    bool enable_ref = true;
    bool enable_stru = true;
    InjectionMode injection_mode = InjectionMode::Sasi;
    RetinexGradMode retinex_grad_mode = RetinexGradMode::Frozen;
    double exposure_base = kDefaultExposureBase;
    double exposure_amplitude = kDefaultExposureAmplitude;
    std::uint64_t seed = 0;

    void validate() const;
};

// One row per gradient evaluation. Component losses are raw (unweighted) and
// 0.0 for disabled terms; total is the lambda-weighted enabled sum.
struct TraceRecord {
    int t = 0;
    int inner = 0;
    double loss_exp = 0.0;
    double loss_ref = 0.0;
    double loss_stru = 0.0;
    double loss_total = 0.0;
    double grad_norm = 0.0;
    long predictor_calls = 0;
};

// Priors computed once per run from the degraded input.
struct GuidanceContext {
    ExposureMap exposure;
    Image reflectance_ref;
    const Restorer* restorer = nullptr;
    GuidanceConfig cfg;
};

GuidanceContext make_guidance_context(const Image& y0, const Restorer& restorer,
                                      const GuidanceConfig& cfg);

struct GradientResult {
    Image grad;
    TraceRecord record;
};

// lambda-weighted sum of the enabled loss gradients at x0_hat; disabled terms
// contribute zero gradient and log zero loss.
GradientResult total_gradient(const Image& x0_hat, const GuidanceContext& ctx);

struct RunResult {
    Image output;
    std::vector<TraceRecord> trace;
};

// Guided ancestral sampling: x_T is seeded from y0, each timestep does one
// noise prediction plus N-1 refinement rounds of (gradient, resample,
// re-predict), and the step to t-1 reuses the round's last gradient. Exactly
// T*N predictor calls. Returns the final clean estimate clamped to [0,1].
RunResult run_pasdiff(const Image& y0, const NoisePredictor& predictor, const Restorer& restorer,
                      const GuidanceConfig& cfg, const NoiseSchedule& sched, Rng& rng);

struct BatchItem {
    bool ok = false;
    Image output;
    std::vector<TraceRecord> trace;
    std::string error;
};

// Independent run per input with its own seed; failures are collected, not
// thrown. Results are index-stable and identical to sequential execution.
std::vector<BatchItem> restore_batch(const std::vector<Image>& inputs, const NoisePredictor& predictor,
                                     const Restorer& restorer, const GuidanceConfig& cfg,
                                     const NoiseSchedule& sched, const std::vector<std::uint64_t>& seeds,
                                     int threads = 1);

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path);

}  // namespace pasguide

#endif
