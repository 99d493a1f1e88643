#ifndef PASGUIDE_DEGRADE_HPP
#define PASGUIDE_DEGRADE_HPP

#include <cstdint>

#include "pasguide/image.hpp"
#include "pasguide/rng.hpp"

namespace pasguide {

// Two-stage synthetic low-light degradation:
//   stage 1 (generic face degradation): blur -> downsample -> AWGN -> JPEG
//   stage 2 (low-light physics):        exposure scale -> hue-preserving gamma
struct DegradationParams {
    double sigma = 0.1;       // blur std, [0.1, 5]
    double down_factor = 1.0; // downsample factor r, [1, 4]
    double noise_std = 0.0;   // AWGN std on the 8-bit scale, [0, 15]
    int jpeg_quality = 100;   // [60, 100]
    double exposure = 0.25;   // fixed exposure factor
    double gamma = 1.8;       // [1.7, 1.9]
    std::uint64_t seed = 0;   // drives the AWGN draw
};

inline constexpr double kExposureFactor = 0.25;

// Uniform draws over the stated ranges; exposure stays fixed at 0.25 and the
// per-image noise seed is taken from the rng stream.
DegradationParams sample_params(Rng& rng);

// Deterministic given (y, p). Noise is added in the downsampled domain and
// clamped to [0,1]; the image is resized back to the input resolution before
// the JPEG round-trip.
Image apply_degradation(const Image& y, const DegradationParams& p);

}  // namespace pasguide

#endif
