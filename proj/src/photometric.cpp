#include "pasguide/photometric.hpp"

#include <algorithm>
#include <cmath>

#include "pasguide/errors.hpp"

namespace pasguide {

ExposureMap build_exposure_map(const Image& y0, double base, double amplitude) {
    Image intensity = to_intensity(y0);
    const double global_mean = intensity.mean();
    Image deviation = intensity;
    for (double& v : deviation.data()) v = global_mean - v;
    Image norm = minmax_norm(deviation);
    for (double& v : norm.data()) v = base + amplitude * v;
    return ExposureMap{std::move(norm), base, amplitude};
}

double exposure_loss(const Image& x0_hat, const ExposureMap& m) {
    if (x0_hat.height() != m.map.height() || x0_hat.width() != m.map.width()) {
        throw InvalidInputError("exposure_loss: spatial dims mismatch");
    }
    const int channels = x0_hat.channels();
    double acc = 0.0;
    for (int y = 0; y < x0_hat.height(); ++y) {
        for (int x = 0; x < x0_hat.width(); ++x) {
            double mean_c = 0.0;
            for (int c = 0; c < channels; ++c) mean_c += x0_hat.at(y, x, c);
            mean_c /= channels;
            const double d = mean_c - m.map.at(y, x, 0);
            acc += d * d;
        }
    }
    return acc / x0_hat.pixel_count();
}

Image exposure_grad(const Image& x0_hat, const ExposureMap& m) {
    if (x0_hat.height() != m.map.height() || x0_hat.width() != m.map.width()) {
        throw InvalidInputError("exposure_grad: spatial dims mismatch");
    }
    const int channels = x0_hat.channels();
    const double scale = 2.0 / (static_cast<double>(channels) * x0_hat.pixel_count());
    Image grad(x0_hat.height(), x0_hat.width(), channels);
    for (int y = 0; y < x0_hat.height(); ++y) {
        for (int x = 0; x < x0_hat.width(); ++x) {
            double mean_c = 0.0;
            for (int c = 0; c < channels; ++c) mean_c += x0_hat.at(y, x, c);
            mean_c /= channels;
            const double g = scale * (mean_c - m.map.at(y, x, 0));
            for (int c = 0; c < channels; ++c) grad.at(y, x, c) = g;
        }
    }
    return grad;
}

double retinex_sigma(const Image& img) {
    return kRetinexSigmaAt256 * std::min(img.height(), img.width()) / 256.0;
}

namespace {

struct RetinexDetail {
    Image raw_illum;  // blurred max-RGB before clamping
    Image illumination;
    Image reflectance;
};

RetinexDetail decompose_detail(const Image& img) {
    if (img.channels() != 3) throw InvalidInputError("retinex_decompose: image must have 3 channels");
    Image max_rgb(img.height(), img.width(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            max_rgb.at(y, x, 0) = std::max({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
        }
    }
    RetinexDetail detail;
    detail.raw_illum = gaussian_blur(max_rgb, retinex_sigma(img));
    detail.illumination = detail.raw_illum;
    for (double& v : detail.illumination.data()) v = std::clamp(v, kIlluminationFloor, 1.0);

    detail.reflectance = Image(img.height(), img.width(), 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double l = detail.illumination.at(y, x, 0);
            for (int c = 0; c < 3; ++c) {
                detail.reflectance.at(y, x, c) = std::clamp(img.at(y, x, c) / l, 0.0, kReflectanceCap);
            }
        }
    }
    return detail;
}

}  // namespace

RetinexPair retinex_decompose(const Image& img) {
    RetinexDetail detail = decompose_detail(img);
    return RetinexPair{std::move(detail.illumination), std::move(detail.reflectance)};
}

double reflectance_loss_with_illum(const Image& x, const Image& illum, const Image& r_ref) {
    if (!x.same_shape(r_ref)) throw InvalidInputError("reflectance_loss: shape mismatch");
    double acc = 0.0;
    for (int y = 0; y < x.height(); ++y) {
        for (int xx = 0; xx < x.width(); ++xx) {
            const double l = illum.at(y, xx, 0);
            for (int c = 0; c < x.channels(); ++c) {
                const double r = std::clamp(x.at(y, xx, c) / l, 0.0, kReflectanceCap);
                const double d = r - r_ref.at(y, xx, c);
                acc += d * d;
            }
        }
    }
    return acc / x.element_count();
}

double reflectance_loss(const Image& x0_hat, const Image& r_ref) {
    const RetinexPair pair = retinex_decompose(x0_hat);
    if (!pair.reflectance.same_shape(r_ref)) throw InvalidInputError("reflectance_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < r_ref.data().size(); ++i) {
        const double d = pair.reflectance.data()[i] - r_ref.data()[i];
        acc += d * d;
    }
    return acc / x0_hat.element_count();
}

Image reflectance_grad(const Image& x0_hat, const Image& r_ref, RetinexGradMode mode) {
    if (!x0_hat.same_shape(r_ref)) throw InvalidInputError("reflectance_grad: shape mismatch");
    const RetinexDetail detail = decompose_detail(x0_hat);
    const double inv_elems = 1.0 / x0_hat.element_count();

    Image grad(x0_hat.height(), x0_hat.width(), 3, 0.0);
    for (int y = 0; y < x0_hat.height(); ++y) {
        for (int x = 0; x < x0_hat.width(); ++x) {
            const double l = detail.illumination.at(y, x, 0);
            for (int c = 0; c < 3; ++c) {
                const double raw = x0_hat.at(y, x, c) / l;
                if (raw <= 0.0 || raw >= kReflectanceCap) continue;  // clamp active
                grad.at(y, x, c) = 2.0 * (raw - r_ref.at(y, x, c)) / l * inv_elems;
            }
        }
    }
    if (mode == RetinexGradMode::Frozen) return grad;

    // Full mode: add dL/dx through L = clamp(blur(maxRGB(x))). Per pixel p the
    // sensitivity of the loss to L_p is -sum_c (R - R_ref)_c * x_c / L^2 (zero
    // where a clamp froze R or L); it is routed back through the blur adjoint
    // to the argmax channel of each source pixel.
    Image illum_sens(x0_hat.height(), x0_hat.width(), 1, 0.0);
    const double sigma = retinex_sigma(x0_hat);
    for (int y = 0; y < x0_hat.height(); ++y) {
        for (int x = 0; x < x0_hat.width(); ++x) {
            const double unclamped = detail.raw_illum.at(y, x, 0);
            if (unclamped <= kIlluminationFloor || unclamped >= 1.0) continue;
            const double l = detail.illumination.at(y, x, 0);
            double acc = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double raw = x0_hat.at(y, x, c) / l;
                if (raw <= 0.0 || raw >= kReflectanceCap) continue;
                acc += (raw - r_ref.at(y, x, c)) * x0_hat.at(y, x, c);
            }
            illum_sens.at(y, x, 0) = -2.0 * acc / (l * l) * inv_elems;
        }
    }
    const Image back = gaussian_blur_adjoint(illum_sens, sigma);
    for (int y = 0; y < x0_hat.height(); ++y) {
        for (int x = 0; x < x0_hat.width(); ++x) {
            int argmax = 0;
            for (int c = 1; c < 3; ++c) {
                if (x0_hat.at(y, x, c) > x0_hat.at(y, x, argmax)) argmax = c;
            }
            grad.at(y, x, argmax) += back.at(y, x, 0);
        }
    }
    return grad;
}

PhyResult phy_loss(const Image& x0_hat, const ExposureMap& m, const Image& r_ref, double lambda_exp,
                   double lambda_ref, RetinexGradMode mode) {
    PhyResult result;
    result.grad = Image(x0_hat.height(), x0_hat.width(), x0_hat.channels(), 0.0);
    if (lambda_exp != 0.0) {
        result.loss += lambda_exp * exposure_loss(x0_hat, m);
        result.grad = add_scaled(result.grad, exposure_grad(x0_hat, m), lambda_exp);
    }
    if (lambda_ref != 0.0) {
        result.loss += lambda_ref * reflectance_loss(x0_hat, r_ref);
        result.grad = add_scaled(result.grad, reflectance_grad(x0_hat, r_ref, mode), lambda_ref);
    }
    return result;
}

}  // namespace pasguide
