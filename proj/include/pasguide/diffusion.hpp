#ifndef PASGUIDE_DIFFUSION_HPP
#define PASGUIDE_DIFFUSION_HPP

#include <vector>

#include "pasguide/image.hpp"
#include "pasguide/rng.hpp"

namespace pasguide {

// Per-timestep DDPM quantities, 1-indexed t in [1, T]. alpha_bar(0) == 1 by
// convention, which makes posterior_var(1) exactly 0 (the last reverse
// transition is deterministic).
class NoiseSchedule {
  public:
    NoiseSchedule(std::vector<double> betas);

    int timesteps() const { return static_cast<int>(betas_.size()); }
    double beta(int t) const { return betas_[index(t)]; }
    double alpha(int t) const { return alphas_[index(t)]; }
    double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars_[index(t)]; }
    double posterior_var(int t) const { return posterior_vars_[index(t)]; }

  private:
    std::size_t index(int t) const;

    std::vector<double> betas_;
    std::vector<double> alphas_;
    std::vector<double> alpha_bars_;
    std::vector<double> posterior_vars_;
};

inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;
inline constexpr int kDefaultTimesteps = 10;

// Linearly spaced betas from beta_start to beta_end over T steps.
NoiseSchedule make_schedule(int timesteps, double beta_start = kDefaultBetaStart,
                            double beta_end = kDefaultBetaEnd);

// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps
Image forward_sample(const Image& x0, int t, const Image& eps, const NoiseSchedule& sched);

// (x_t - sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_bar_t)
Image predict_x0(const Image& x_t, const Image& eps_hat, int t, const NoiseSchedule& sched);

// (x_t - beta_t / sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_t)
Image reverse_mean(const Image& x_t, const Image& eps_hat, int t, const NoiseSchedule& sched);

// Sample from N(mean - s * variance * g, variance * I). variance == 0 returns
// the shifted mean with no RNG consumption.
Image guided_transition(const Image& mean, double variance, const Image& g, double s, Rng& rng);

// Image of i.i.d. standard normal draws, row-major element order.
Image normal_image(int height, int width, int channels, Rng& rng);

}  // namespace pasguide

#endif
