#ifndef PASGUIDE_TESTS_FIXTURES_HPP
#define PASGUIDE_TESTS_FIXTURES_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pasguide/image.hpp"
#include "pasguide/rng.hpp"

namespace fixtures {

using pasguide::Image;
using pasguide::Rng;

Image random_image(Rng& rng, int h, int w, int c, double lo = 0.0, double hi = 1.0);

// Procedural face-like crop: gradient background, skin-tone ellipse, eyes,
// mouth, highlight and fine texture; deterministic per seed.
Image synthetic_face(std::uint64_t seed, int size);

// brightness scale -> gaussian blur -> desaturation toward the intensity map.
// Blur and desaturation both preserve the mean, so the three factors move
// orthogonal statistics.
Image face_variant(const Image& base, double brightness, double blur_sigma, double desat);

// 16 variants of one face: 4 brightness levels x {sharp, blurred} x
// {colorful, desaturated}; index 0 is the unmodified base.
std::vector<Image> variant_gallery(const Image& base);

// Same face at `count` brightness levels from lo to hi.
std::vector<Image> brightness_ramp_gallery(const Image& base, int count, double lo, double hi);

// Central finite differences of a scalar loss.
Image fd_gradient(const std::function<double(const Image&)>& loss, const Image& x, double step = 1e-4);

// max|fd - analytic| / max(max|analytic|, 1e-12)
double max_rel_err(const Image& analytic, const Image& fd);

// Direct (non-separable) Catmull-Rom resampler, the resize oracle.
Image reference_bicubic(const Image& img, int out_h, int out_w);

// Fresh unique directory under the system temp root.
std::string make_temp_dir(const std::string& tag);

std::vector<unsigned char> read_file_bytes(const std::string& path);

double median(std::vector<double> values);

}  // namespace fixtures

#endif
