#include "pasguide/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "pasguide/errors.hpp"
#include "pasguide/image_io.hpp"

namespace pasguide {

DegradationParams sample_params(Rng& rng) {
    DegradationParams p;
    p.sigma = rng.uniform(0.1, 5.0);
    p.down_factor = rng.uniform(1.0, 4.0);
    p.noise_std = rng.uniform(0.0, 15.0);
    p.jpeg_quality = static_cast<int>(rng.uniform_int(60, 100));
    p.exposure = kExposureFactor;
    p.gamma = rng.uniform(1.7, 1.9);
    p.seed = rng.next_seed();
    return p;
}

Image apply_degradation(const Image& y, const DegradationParams& p) {
    if (y.channels() != 3) throw InvalidInputError("apply_degradation: image must have 3 channels");

    Image img = gaussian_blur(y, p.sigma);

    const int down_h = std::max(1, static_cast<int>(std::lround(y.height() / p.down_factor)));
    const int down_w = std::max(1, static_cast<int>(std::lround(y.width() / p.down_factor)));
    img = resize(img, down_h, down_w);

    if (p.noise_std > 0.0) {
        Rng noise_rng(p.seed);
        const double std01 = p.noise_std / 255.0;
        for (double& v : img.data()) v += std01 * noise_rng.normal();
    }
    for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);

    img = resize(img, y.height(), y.width());
    img = jpeg_roundtrip(img, p.jpeg_quality);

    for (double& v : img.data()) v *= p.exposure;
    return hue_preserving_gamma(img, p.gamma);
}

}  // namespace pasguide
