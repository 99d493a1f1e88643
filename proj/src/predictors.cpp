#include "pasguide/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "pasguide/errors.hpp"
#include "pasguide/image_io.hpp"

namespace pasguide {

Image exact_eps(const Image& x_t, const Image& x0, int t, const NoiseSchedule& sched) {
    if (!x_t.same_shape(x0)) throw InvalidInputError("exact_eps: shape mismatch");
    const double bar = sched.alpha_bar(t);
    if (bar == 1.0) throw SingularityError("exact_eps: alpha_bar is one");
    const double a = std::sqrt(bar);
    const double inv = 1.0 / std::sqrt(1.0 - bar);
    Image out = x_t;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (x_t.data()[i] - a * x0.data()[i]) * inv;
    }
    return out;
}

GalleryPrior::GalleryPrior(std::vector<Image> images) : images_(std::move(images)) {
    if (images_.empty()) throw InvalidInputError("GalleryPrior: empty gallery");
    for (const auto& img : images_) {
        if (!img.same_shape(images_.front())) {
            throw InvalidInputError("GalleryPrior: images must share one shape");
        }
    }
}

GalleryPrior load_gallery(const std::string& directory) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) throw IoError("load_gallery: not a directory: " + directory);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Image> images;
    images.reserve(paths.size());
    for (const auto& p : paths) images.push_back(load_png(p));
    return GalleryPrior(std::move(images));
}

std::vector<double> mixture_posterior_weights(const Image& x_t, int t, const NoiseSchedule& sched,
                                              const GalleryPrior& prior) {
    const double bar = sched.alpha_bar(t);
    if (!(bar > 0.0 && bar < 1.0)) throw SingularityError("mixture_posterior_weights: degenerate alpha_bar");
    const double a = std::sqrt(bar);
    const double inv_two_var = 1.0 / (2.0 * (1.0 - bar));

    // Squared distances over full images overflow exp; work in log space.
    std::vector<double> log_w(static_cast<std::size_t>(prior.size()));
    for (int i = 0; i < prior.size(); ++i) {
        const Image& y = prior.images()[static_cast<std::size_t>(i)];
        if (!y.same_shape(x_t)) throw InvalidInputError("mixture_posterior_weights: shape mismatch");
        double dist2 = 0.0;
        for (std::size_t e = 0; e < x_t.data().size(); ++e) {
            const double d = x_t.data()[e] - a * y.data()[e];
            dist2 += d * d;
        }
        log_w[static_cast<std::size_t>(i)] = -dist2 * inv_two_var;
    }
    const double max_log = *std::max_element(log_w.begin(), log_w.end());
    double sum = 0.0;
    for (double& w : log_w) {
        w = std::exp(w - max_log);
        sum += w;
    }
    for (double& w : log_w) w /= sum;
    return log_w;
}

Image mixture_predict(const Image& x_t, int t, const NoiseSchedule& sched, const GalleryPrior& prior) {
    const auto weights = mixture_posterior_weights(x_t, t, sched, prior);
    Image posterior_mean(x_t.height(), x_t.width(), x_t.channels(), 0.0);
    for (int i = 0; i < prior.size(); ++i) {
        const Image& y = prior.images()[static_cast<std::size_t>(i)];
        const double w = weights[static_cast<std::size_t>(i)];
        for (std::size_t e = 0; e < posterior_mean.data().size(); ++e) {
            posterior_mean.data()[e] += w * y.data()[e];
        }
    }
    return exact_eps(x_t, posterior_mean, t, sched);
}

}  // namespace pasguide
