#ifndef PASGUIDE_SASI_HPP
#define PASGUIDE_SASI_HPP

#include <memory>
#include <string>
#include <vector>

#include "pasguide/image.hpp"

namespace pasguide {

inline constexpr double kAdainEpsilon = 1e-5;

// External restoration prior: deterministic, shape-preserving, finite output.
class Restorer {
  public:
    virtual ~Restorer() = default;
    virtual Image restore(const Image& x) const = 0;
};

class IdentityRestorer : public Restorer {
  public:
    Image restore(const Image& x) const override { return x; }
};

// clamp(x + amount * (x - blur(x, sigma)), 0, 1)
class UnsharpRestorer : public Restorer {
  public:
    UnsharpRestorer(double amount, double sigma);
    Image restore(const Image& x) const override;

  private:
    double amount_;
    double sigma_;
};

inline std::unique_ptr<Restorer> unsharp_restorer(double amount, double sigma) {
    return std::make_unique<UnsharpRestorer>(amount, sigma);
}

// Registry for CLI selection. "external" is a reserved extension point and
// reports itself unimplemented.
std::unique_ptr<Restorer> make_restorer(const std::string& name, double unsharp_amount,
                                        double unsharp_sigma);

// Per-channel spatial mean and population standard deviation.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

ChannelStats channel_stats(const Image& img);

// Per channel: std(x0_hat) * (prior - mean(prior)) / (std(prior) + eps) + mean(x0_hat).
// Re-projects the prior's structure onto x0_hat's photometric statistics.
Image adain_align(const Image& prior_out, const Image& x0_hat, double eps_n = kAdainEpsilon);

struct InjectionResult {
    double loss = 0.0;
    Image target;  // held constant when differentiating
};

// L = mean((x0_hat - adain_align(restorer(x0_hat), x0_hat))^2)
InjectionResult structural_loss(const Image& x0_hat, const Restorer& restorer);

// Ablation variant: plain MSE against the frozen restorer output.
InjectionResult mse_injection_loss(const Image& x0_hat, const Restorer& restorer);

// 2 * (x0_hat - target) / element_count, target frozen.
Image structural_grad(const Image& x0_hat, const Image& aligned_target);

}  // namespace pasguide

#endif
