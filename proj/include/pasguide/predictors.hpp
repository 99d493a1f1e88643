#ifndef PASGUIDE_PREDICTORS_HPP
#define PASGUIDE_PREDICTORS_HPP

#include <atomic>
#include <string>
#include <vector>

#include "pasguide/diffusion.hpp"
#include "pasguide/image.hpp"

namespace pasguide {

// Noise-prediction contract: output shape == input shape, deterministic for
// fixed inputs. Implementations must be safe for concurrent predict() calls.
class NoisePredictor {
  public:
    virtual ~NoisePredictor() = default;
    virtual Image predict(const Image& x_t, int t, const NoiseSchedule& sched) const = 0;
};

// The noise a forward sample of x0 must have carried to land on x_t:
// (x_t - sqrt(alpha_bar_t) * x0) / sqrt(1 - alpha_bar_t).
Image exact_eps(const Image& x_t, const Image& x0, int t, const NoiseSchedule& sched);

// Oracle predictor for tests and reference runs: knows the true clean image.
class ExactPredictor : public NoisePredictor {
  public:
    explicit ExactPredictor(Image x0) : x0_(std::move(x0)) {}
    Image predict(const Image& x_t, int t, const NoiseSchedule& sched) const override {
        return exact_eps(x_t, x0_, t, sched);
    }

  private:
    Image x0_;
};

// Finite empirical prior: a non-empty list of same-shape images.
class GalleryPrior {
  public:
    explicit GalleryPrior(std::vector<Image> images);

    const std::vector<Image>& images() const { return images_; }
    int size() const { return static_cast<int>(images_.size()); }

  private:
    std::vector<Image> images_;
};

// Loads every *.png in the directory, sorted by filename.
GalleryPrior load_gallery(const std::string& directory);

// Posterior component weights w_i ∝ exp(-||x_t - sqrt(ab)*y_i||^2 / (2(1-ab))),
// normalized; computed in log space with max subtraction.
std::vector<double> mixture_posterior_weights(const Image& x_t, int t, const NoiseSchedule& sched,
                                              const GalleryPrior& prior);

// Exact posterior-mean noise prediction when x0 is drawn uniformly from the
// gallery: eps_hat = (x_t - sqrt(ab) * E[x0|x_t]) / sqrt(1-ab).
Image mixture_predict(const Image& x_t, int t, const NoiseSchedule& sched, const GalleryPrior& prior);

class MixturePredictor : public NoisePredictor {
  public:
    explicit MixturePredictor(GalleryPrior prior) : prior_(std::move(prior)) {}
    Image predict(const Image& x_t, int t, const NoiseSchedule& sched) const override {
        return mixture_predict(x_t, t, sched, prior_);
    }
    const GalleryPrior& prior() const { return prior_; }

  private:
    GalleryPrior prior_;
};

// Decorator counting predict() calls; used by the bench command and the
// structural call-count checks.
class CountingPredictor : public NoisePredictor {
  public:
    explicit CountingPredictor(const NoisePredictor& inner) : inner_(inner) {}
    Image predict(const Image& x_t, int t, const NoiseSchedule& sched) const override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.predict(x_t, t, sched);
    }
    long calls() const { return calls_.load(std::memory_order_relaxed); }
    void reset() { calls_.store(0, std::memory_order_relaxed); }

  private:
    const NoisePredictor& inner_;
    mutable std::atomic<long> calls_{0};
};

// Extension point: an adapter that exchanges x_t / eps_hat with an external
// process (e.g. a pretrained network behind a file or pipe protocol) belongs
// here. The CLI reserves the predictor name "external" for it; it is not
// implemented in this repository.

}  // namespace pasguide

#endif
