#include "pasguide/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "pasguide/photometric.hpp"
#include "pasguide/rng.hpp"
#include "pasguide/sampler.hpp"
#include "pasguide/sasi.hpp"

namespace pasguide::gradcheck {

Image finite_difference(const LossFn& loss, const Image& x, double step) {
    Image grad(x.height(), x.width(), x.channels());
    Image probe = x;
    for (std::size_t i = 0; i < probe.data().size(); ++i) {
        const double original = probe.data()[i];
        probe.data()[i] = original + step;
        const double up = loss(probe);
        probe.data()[i] = original - step;
        const double down = loss(probe);
        probe.data()[i] = original;
        grad.data()[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double relative_error(const Image& analytic, const Image& fd) {
    double num = 0.0;
    double den = 1e-12;
    for (std::size_t i = 0; i < analytic.data().size(); ++i) {
        num = std::max(num, std::fabs(fd.data()[i] - analytic.data()[i]));
        den = std::max(den, std::fabs(analytic.data()[i]));
    }
    return num / den;
}

CheckResult check_gradient(const std::string& name, const LossFn& loss, const Image& analytic,
                           const Image& x, double tolerance, double step) {
    const Image fd = finite_difference(loss, x, step);
    const double err = relative_error(analytic, fd);
    return CheckResult{name, err, tolerance, err < tolerance};
}

namespace {

Image random_image(Rng& rng, int h, int w, int c, double lo, double hi) {
    Image img(h, w, c);
    for (double& v : img.data()) v = rng.uniform(lo, hi);
    return img;
}

void fold_trial(CheckResult& acc, const CheckResult& trial) {
    acc.max_rel_err = std::max(acc.max_rel_err, trial.max_rel_err);
    acc.pass = acc.max_rel_err < acc.tolerance;
}

}  // namespace

std::vector<CheckResult> run_suite(std::uint64_t seed, int trials) {
    Rng rng(seed);
    const int n = 8;
    const UnsharpRestorer restorer(0.8, 1.0);

    CheckResult exposure{"exposure_grad", 0.0, 1e-4, true};
    CheckResult reflectance{"reflectance_grad(frozen-L)", 0.0, 1e-3, true};
    CheckResult structural{"structural_grad(frozen-target)", 0.0, 1e-6, true};
    CheckResult mse{"mse_injection_grad(frozen-target)", 0.0, 1e-6, true};
    CheckResult total{"total_gradient", 0.0, 1e-3, true};

    for (int trial = 0; trial < trials; ++trial) {
        // Exposure: unrestricted inputs.
        {
            const Image x = random_image(rng, n, n, 3, 0.0, 1.0);
            const ExposureMap map = build_exposure_map(random_image(rng, n, n, 3, 0.0, 1.0));
            const auto loss = [&](const Image& v) { return exposure_loss(v, map); };
            fold_trial(exposure, check_gradient("", loss, exposure_grad(x, map), x, exposure.tolerance));
        }
        // Reflectance against the frozen-L surrogate; the [0.3,0.7] range keeps
        // both Retinex clamps inactive so the surrogate stays smooth.
        {
            const Image x = random_image(rng, n, n, 3, 0.3, 0.7);
            const Image r_ref = retinex_decompose(random_image(rng, n, n, 3, 0.3, 0.7)).reflectance;
            const Image frozen_illum = retinex_decompose(x).illumination;
            const auto loss = [&](const Image& v) {
                return reflectance_loss_with_illum(v, frozen_illum, r_ref);
            };
            fold_trial(reflectance,
                       check_gradient("", loss, reflectance_grad(x, r_ref), x, reflectance.tolerance));
        }
        // Structural and MSE injection against their frozen targets.
        {
            const Image x = random_image(rng, n, n, 3, 0.0, 1.0);
            const Image target = structural_loss(x, restorer).target;
            const auto loss = [&](const Image& v) {
                double acc = 0.0;
                for (std::size_t i = 0; i < v.data().size(); ++i) {
                    const double d = v.data()[i] - target.data()[i];
                    acc += d * d;
                }
                return acc / v.element_count();
            };
            fold_trial(structural,
                       check_gradient("", loss, structural_grad(x, target), x, structural.tolerance));

            const Image mse_target = mse_injection_loss(x, restorer).target;
            const auto mse_loss = [&](const Image& v) {
                double acc = 0.0;
                for (std::size_t i = 0; i < v.data().size(); ++i) {
                    const double d = v.data()[i] - mse_target.data()[i];
                    acc += d * d;
                }
                return acc / v.element_count();
            };
            fold_trial(mse, check_gradient("", mse_loss, structural_grad(x, mse_target), x, mse.tolerance));
        }
        // Total gradient against the full frozen surrogate.
        {
            const Image y0 = random_image(rng, n, n, 3, 0.3, 0.7);
            const Image x = random_image(rng, n, n, 3, 0.3, 0.7);
            GuidanceConfig cfg;
            const GuidanceContext ctx = make_guidance_context(y0, restorer, cfg);
            const Image frozen_illum = retinex_decompose(x).illumination;
            const Image target = structural_loss(x, restorer).target;
            const auto loss = [&](const Image& v) {
                double stru = 0.0;
                for (std::size_t i = 0; i < v.data().size(); ++i) {
                    const double d = v.data()[i] - target.data()[i];
                    stru += d * d;
                }
                stru /= v.element_count();
                return cfg.lambda_exp * exposure_loss(v, ctx.exposure) +
                       cfg.lambda_ref * reflectance_loss_with_illum(v, frozen_illum, ctx.reflectance_ref) +
                       cfg.lambda_stru * stru;
            };
            fold_trial(total, check_gradient("", loss, total_gradient(x, ctx).grad, x, total.tolerance));
        }
    }
    return {exposure, reflectance, structural, mse, total};
}

}  // namespace pasguide::gradcheck
