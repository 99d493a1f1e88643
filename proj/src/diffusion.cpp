#include "pasguide/diffusion.hpp"

#include <cmath>
#include <string>

#include "pasguide/errors.hpp"

namespace pasguide {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.empty()) throw InvalidInputError("NoiseSchedule: empty beta sequence");
    alphas_.reserve(betas_.size());
    alpha_bars_.reserve(betas_.size());
    posterior_vars_.reserve(betas_.size());
    double bar = 1.0;
    double prev_bar = 1.0;
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        const double b = betas_[i];
        if (!(b > 0.0 && b < 1.0)) {
            throw InvalidInputError("NoiseSchedule: beta[" + std::to_string(i + 1) + "] outside (0,1)");
        }
        const double a = 1.0 - b;
        bar *= a;
        if (bar >= prev_bar) throw InvalidInputError("NoiseSchedule: alpha_bar not strictly decreasing");
        alphas_.push_back(a);
        alpha_bars_.push_back(bar);
        posterior_vars_.push_back(b * (1.0 - prev_bar) / (1.0 - bar));
        prev_bar = bar;
    }
}

std::size_t NoiseSchedule::index(int t) const {
    if (t < 1 || t > timesteps()) {
        throw InvalidInputError("NoiseSchedule: timestep " + std::to_string(t) + " outside [1," +
                                std::to_string(timesteps()) + "]");
    }
    return static_cast<std::size_t>(t - 1);
}

NoiseSchedule make_schedule(int timesteps, double beta_start, double beta_end) {
    if (timesteps < 1) throw InvalidInputError("make_schedule: T must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw InvalidInputError("make_schedule: need 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(static_cast<std::size_t>(timesteps));
    if (timesteps == 1) {
        betas[0] = beta_start;
    } else {
        const double step = (beta_end - beta_start) / (timesteps - 1);
        for (int i = 0; i < timesteps; ++i) betas[static_cast<std::size_t>(i)] = beta_start + step * i;
    }
    return NoiseSchedule(std::move(betas));
}

Image forward_sample(const Image& x0, int t, const Image& eps, const NoiseSchedule& sched) {
    if (!x0.same_shape(eps)) throw InvalidInputError("forward_sample: shape mismatch");
    const double bar = sched.alpha_bar(t);
    const double a = std::sqrt(bar);
    const double b = std::sqrt(1.0 - bar);
    Image out = x0;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = a * x0.data()[i] + b * eps.data()[i];
    }
    return out;
}

Image predict_x0(const Image& x_t, const Image& eps_hat, int t, const NoiseSchedule& sched) {
    if (!x_t.same_shape(eps_hat)) throw InvalidInputError("predict_x0: shape mismatch");
    const double bar = sched.alpha_bar(t);
    if (bar == 0.0) throw SingularityError("predict_x0: alpha_bar is zero");
    const double inv = 1.0 / std::sqrt(bar);
    const double b = std::sqrt(1.0 - bar);
    Image out = x_t;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (x_t.data()[i] - b * eps_hat.data()[i]) * inv;
    }
    return out;
}

Image reverse_mean(const Image& x_t, const Image& eps_hat, int t, const NoiseSchedule& sched) {
    if (!x_t.same_shape(eps_hat)) throw InvalidInputError("reverse_mean: shape mismatch");
    const double bar = sched.alpha_bar(t);
    const double coeff = sched.beta(t) / std::sqrt(1.0 - bar);
    const double inv = 1.0 / std::sqrt(sched.alpha(t));
    Image out = x_t;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (x_t.data()[i] - coeff * eps_hat.data()[i]) * inv;
    }
    return out;
}

Image guided_transition(const Image& mean, double variance, const Image& g, double s, Rng& rng) {
    if (!mean.same_shape(g)) throw InvalidInputError("guided_transition: shape mismatch");
    if (variance < 0.0) throw InvalidInputError("guided_transition: negative variance");
    Image out = mean;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = mean.data()[i] - s * variance * g.data()[i];
    }
    if (variance == 0.0) return out;
    const double stddev = std::sqrt(variance);
    for (double& v : out.data()) v += stddev * rng.normal();
    return out;
}

Image normal_image(int height, int width, int channels, Rng& rng) {
    Image out(height, width, channels);
    for (double& v : out.data()) v = rng.normal();
    return out;
}

}  // namespace pasguide
