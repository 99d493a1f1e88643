#ifndef PASGUIDE_PHOTOMETRIC_HPP
#define PASGUIDE_PHOTOMETRIC_HPP

#include "pasguide/image.hpp"

namespace pasguide {

inline constexpr double kDefaultExposureBase = 0.55;
inline constexpr double kDefaultExposureAmplitude = 0.15;

// Illumination floor and reflectance cap; they keep the Retinex division
// bounded in near-black regions.
inline constexpr double kIlluminationFloor = 1e-2;
inline constexpr double kReflectanceCap = 3.0;

// Reference sigma for the illumination blur at 256 px, scaled with image size.
inline constexpr double kRetinexSigmaAt256 = 15.0;

// Spatially-varying brightness target: base + amplitude * Norm(mean(I) - I).
// Darker pixels receive higher targets; every value lies in
// [base, base + amplitude].
struct ExposureMap {
    Image map;  // single channel
    double base = kDefaultExposureBase;
    double amplitude = kDefaultExposureAmplitude;
};

// Illumination L in [floor, 1] and 3-channel reflectance R in [0, cap] with
// R*L reconstructing the source wherever neither clamp engages.
struct RetinexPair {
    Image illumination;
    Image reflectance;
};

enum class RetinexGradMode { Frozen, Full };

ExposureMap build_exposure_map(const Image& y0, double base = kDefaultExposureBase,
                               double amplitude = kDefaultExposureAmplitude);

// Mean over pixels of (channel-mean(x0_hat) - map)^2.
double exposure_loss(const Image& x0_hat, const ExposureMap& m);

// d(exposure_loss)/dx: 2 * (channel-mean - map) / (C * P) per element.
Image exposure_grad(const Image& x0_hat, const ExposureMap& m);

double retinex_sigma(const Image& img);

// Classical decomposition: L = clamp(blur(maxRGB), floor, 1), R = clamp(I/L, 0, cap).
RetinexPair retinex_decompose(const Image& img);

// Reflectance of x against a fixed illumination map (the frozen-L surrogate's
// loss); retinex_decompose's own L reproduces reflectance_loss.
double reflectance_loss_with_illum(const Image& x, const Image& illum, const Image& r_ref);

double reflectance_loss(const Image& x0_hat, const Image& r_ref);

// Gradient with L(x0_hat) treated as constant for the step; zero where the
// reflectance clamp is active. Full mode also differentiates through the
// max-RGB + blur illumination estimate.
Image reflectance_grad(const Image& x0_hat, const Image& r_ref,
                       RetinexGradMode mode = RetinexGradMode::Frozen);

struct PhyResult {
    double loss = 0.0;
    Image grad;
};

// lambda_exp * exposure + lambda_ref * reflectance, loss and gradient together.
PhyResult phy_loss(const Image& x0_hat, const ExposureMap& m, const Image& r_ref, double lambda_exp,
                   double lambda_ref, RetinexGradMode mode = RetinexGradMode::Frozen);

}  // namespace pasguide

#endif
