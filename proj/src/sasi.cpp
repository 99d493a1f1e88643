#include "pasguide/sasi.hpp"

#include <algorithm>
#include <cmath>

#include "pasguide/errors.hpp"

namespace pasguide {

UnsharpRestorer::UnsharpRestorer(double amount, double sigma) : amount_(amount), sigma_(sigma) {
    if (amount < 0.0) throw InvalidInputError("UnsharpRestorer: amount must be non-negative");
    if (sigma <= 0.0) throw InvalidInputError("UnsharpRestorer: sigma must be positive");
}

Image UnsharpRestorer::restore(const Image& x) const {
    const Image blurred = gaussian_blur(x, sigma_);
    Image out = x;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = std::clamp(x.data()[i] + amount_ * (x.data()[i] - blurred.data()[i]), 0.0, 1.0);
    }
    return out;
}

std::unique_ptr<Restorer> make_restorer(const std::string& name, double unsharp_amount,
                                        double unsharp_sigma) {
    if (name == "identity") return std::make_unique<IdentityRestorer>();
    if (name == "unsharp") return std::make_unique<UnsharpRestorer>(unsharp_amount, unsharp_sigma);
    if (name == "external") {
        throw InvalidInputError("restorer 'external' is a reserved extension point and is not implemented");
    }
    throw InvalidInputError("unknown restorer '" + name + "' (expected identity|unsharp)");
}

ChannelStats channel_stats(const Image& img) {
    const int channels = img.channels();
    const double inv_pixels = 1.0 / img.pixel_count();
    ChannelStats stats;
    stats.mean.assign(static_cast<std::size_t>(channels), 0.0);
    stats.stddev.assign(static_cast<std::size_t>(channels), 0.0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < channels; ++c) stats.mean[static_cast<std::size_t>(c)] += img.at(y, x, c);
        }
    }
    for (double& m : stats.mean) m *= inv_pixels;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < channels; ++c) {
                const double d = img.at(y, x, c) - stats.mean[static_cast<std::size_t>(c)];
                stats.stddev[static_cast<std::size_t>(c)] += d * d;
            }
        }
    }
    for (double& s : stats.stddev) s = std::sqrt(s * inv_pixels);
    return stats;
}

Image adain_align(const Image& prior_out, const Image& x0_hat, double eps_n) {
    if (!prior_out.same_shape(x0_hat)) throw InvalidInputError("adain_align: shape mismatch");
    if (eps_n <= 0.0) throw InvalidInputError("adain_align: eps must be positive");
    const ChannelStats prior_stats = channel_stats(prior_out);
    const ChannelStats target_stats = channel_stats(x0_hat);
    Image out(x0_hat.height(), x0_hat.width(), x0_hat.channels());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            for (int c = 0; c < out.channels(); ++c) {
                const auto ci = static_cast<std::size_t>(c);
                const double normalized =
                    (prior_out.at(y, x, c) - prior_stats.mean[ci]) / (prior_stats.stddev[ci] + eps_n);
                out.at(y, x, c) = target_stats.stddev[ci] * normalized + target_stats.mean[ci];
            }
        }
    }
    return out;
}

namespace {

double frozen_target_mse(const Image& x, const Image& target) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.data().size(); ++i) {
        const double d = x.data()[i] - target.data()[i];
        acc += d * d;
    }
    return acc / x.element_count();
}

}  // namespace

InjectionResult structural_loss(const Image& x0_hat, const Restorer& restorer) {
    Image target = adain_align(restorer.restore(x0_hat), x0_hat);
    return InjectionResult{frozen_target_mse(x0_hat, target), std::move(target)};
}

InjectionResult mse_injection_loss(const Image& x0_hat, const Restorer& restorer) {
    Image target = restorer.restore(x0_hat);
    if (!target.same_shape(x0_hat)) throw InvalidInputError("mse_injection_loss: restorer changed shape");
    return InjectionResult{frozen_target_mse(x0_hat, target), std::move(target)};
}

Image structural_grad(const Image& x0_hat, const Image& aligned_target) {
    if (!x0_hat.same_shape(aligned_target)) throw InvalidInputError("structural_grad: shape mismatch");
    const double scale = 2.0 / x0_hat.element_count();
    Image grad = x0_hat;
    for (std::size_t i = 0; i < grad.data().size(); ++i) {
        grad.data()[i] = scale * (x0_hat.data()[i] - aligned_target.data()[i]);
    }
    return grad;
}

}  // namespace pasguide
