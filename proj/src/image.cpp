#include "pasguide/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pasguide/errors.hpp"

namespace pasguide {

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels),
      data_(static_cast<std::size_t>(height) * width * channels, fill) {
    if (height < 1 || width < 1 || channels < 1) {
        throw InvalidInputError("Image: dimensions must be positive");
    }
}

Image::Image(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (height < 1 || width < 1 || channels < 1) {
        throw InvalidInputError("Image: dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
        throw InvalidInputError("Image: data length does not match dimensions");
    }
}

double Image::mean() const {
    double acc = 0.0;
    for (double v : data_) acc += v;
    return data_.empty() ? 0.0 : acc / static_cast<double>(data_.size());
}

double Image::min_value() const {
    return *std::min_element(data_.begin(), data_.end());
}

double Image::max_value() const {
    return *std::max_element(data_.begin(), data_.end());
}

bool Image::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Image& Image::operator+=(const Image& other) {
    if (!same_shape(other)) throw InvalidInputError("Image +=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Image& Image::operator-=(const Image& other) {
    if (!same_shape(other)) throw InvalidInputError("Image -=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Image& Image::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

bool operator==(const Image& a, const Image& b) {
    return a.same_shape(b) && a.data() == b.data();
}

Image add_scaled(const Image& a, const Image& b, double s) {
    if (!a.same_shape(b)) throw InvalidInputError("add_scaled: shape mismatch");
    Image out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += s * b.data()[i];
    return out;
}

Image clamp01(const Image& img) {
    Image out = img;
    for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double max_abs_diff(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw InvalidInputError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    }
    return m;
}

Image to_intensity(const Image& img) {
    if (img.channels() != 3) throw InvalidInputError("to_intensity: image must have 3 channels");
    Image out(img.height(), img.width(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out.at(y, x, 0) = (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
        }
    }
    return out;
}

Image minmax_norm(const Image& m) {
    const double lo = m.min_value();
    const double hi = m.max_value();
    Image out = m;
    if (hi == lo) {
        std::fill(out.data().begin(), out.data().end(), 0.0);
        return out;
    }
    const double span = hi - lo;
    for (double& v : out.data()) v = (v - lo) / span;
    return out;
}

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma < 0.0) throw InvalidInputError("gaussian_kernel: sigma must be non-negative");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

namespace {

enum class ConvDir { Horizontal, Vertical };

Image convolve_1d(const Image& img, const std::vector<double>& kernel, ConvDir dir) {
    const int radius = static_cast<int>(kernel.size()) / 2;
    Image out(img.height(), img.width(), img.channels());
    const int n = dir == ConvDir::Horizontal ? img.width() : img.height();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0;
                for (int j = -radius; j <= radius; ++j) {
                    const int p = reflect_index((dir == ConvDir::Horizontal ? x : y) + j, n);
                    const double v = dir == ConvDir::Horizontal ? img.at(y, p, c) : img.at(p, x, c);
                    acc += kernel[static_cast<std::size_t>(j + radius)] * v;
                }
                out.at(y, x, c) = acc;
            }
        }
    }
    return out;
}

// Scatter form: acc[reflect(i+j)] += k[j] * in[i]. Transpose of convolve_1d.
Image scatter_1d(const Image& img, const std::vector<double>& kernel, ConvDir dir) {
    const int radius = static_cast<int>(kernel.size()) / 2;
    Image out(img.height(), img.width(), img.channels(), 0.0);
    const int n = dir == ConvDir::Horizontal ? img.width() : img.height();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                const double v = img.at(y, x, c);
                for (int j = -radius; j <= radius; ++j) {
                    const int p = reflect_index((dir == ConvDir::Horizontal ? x : y) + j, n);
                    const double w = kernel[static_cast<std::size_t>(j + radius)] * v;
                    if (dir == ConvDir::Horizontal) {
                        out.at(y, p, c) += w;
                    } else {
                        out.at(p, x, c) += w;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
    if (sigma < 0.0) throw InvalidInputError("gaussian_blur: sigma must be non-negative");
    if (sigma == 0.0) return img;
    const auto kernel = gaussian_kernel(sigma);
    return convolve_1d(convolve_1d(img, kernel, ConvDir::Horizontal), kernel, ConvDir::Vertical);
}

Image gaussian_blur_adjoint(const Image& img, double sigma) {
    if (sigma < 0.0) throw InvalidInputError("gaussian_blur_adjoint: sigma must be non-negative");
    if (sigma == 0.0) return img;
    const auto kernel = gaussian_kernel(sigma);
    return scatter_1d(scatter_1d(img, kernel, ConvDir::Vertical), kernel, ConvDir::Horizontal);
}

namespace {

// Catmull-Rom cubic (a = -0.5).
double cubic_weight(double x) {
    x = std::fabs(x);
    if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
    if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
    return 0.0;
}

// One separable pass along an axis from length `in_n` to `out_n`.
Image resize_axis(const Image& img, int out_n, ConvDir dir) {
    const int in_n = dir == ConvDir::Horizontal ? img.width() : img.height();
    const int out_h = dir == ConvDir::Horizontal ? img.height() : out_n;
    const int out_w = dir == ConvDir::Horizontal ? out_n : img.width();
    Image out(out_h, out_w, img.channels());
    const double scale = static_cast<double>(in_n) / static_cast<double>(out_n);
    for (int o = 0; o < out_n; ++o) {
        const double src = (o + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(src));
        const double t = src - base;
        double w[4];
        for (int k = 0; k < 4; ++k) w[k] = cubic_weight(t - (k - 1));
        const int other_n = dir == ConvDir::Horizontal ? img.height() : img.width();
        for (int q = 0; q < other_n; ++q) {
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    const int p = std::clamp(base + k - 1, 0, in_n - 1);
                    acc += w[k] * (dir == ConvDir::Horizontal ? img.at(q, p, c) : img.at(p, q, c));
                }
                if (dir == ConvDir::Horizontal) {
                    out.at(q, o, c) = acc;
                } else {
                    out.at(o, q, c) = acc;
                }
            }
        }
    }
    return out;
}

}  // namespace

Image resize(const Image& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) throw InvalidInputError("resize: output dims must be >= 1");
    if (out_h == img.height() && out_w == img.width()) return img;
    Image tmp = img.width() == out_w ? img : resize_axis(img, out_w, ConvDir::Horizontal);
    return tmp.height() == out_h ? tmp : resize_axis(tmp, out_h, ConvDir::Vertical);
}

namespace {

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double kDelta3 = 216.0 / 24389.0;  // (6/29)^3
    constexpr double kSlope = 24389.0 / 27.0 / 116.0;  // 1 / (3*(6/29)^2)
    return t > kDelta3 ? std::cbrt(t) : kSlope * t + 16.0 / 116.0;
}

}  // namespace

Image rgb_to_lab(const Image& img) {
    if (img.channels() != 3) throw InvalidInputError("rgb_to_lab: image must have 3 channels");
    constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
    Image out(img.height(), img.width(), 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double r = srgb_to_linear(img.at(y, x, 0));
            const double g = srgb_to_linear(img.at(y, x, 1));
            const double b = srgb_to_linear(img.at(y, x, 2));
            const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
            const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
            const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
            const double fx = lab_f(X / kXn);
            const double fy = lab_f(Y / kYn);
            const double fz = lab_f(Z / kZn);
            out.at(y, x, 0) = 116.0 * fy - 16.0;
            out.at(y, x, 1) = 500.0 * (fx - fy);
            out.at(y, x, 2) = 200.0 * (fy - fz);
        }
    }
    return out;
}

Image hue_preserving_gamma(const Image& img, double gamma) {
    if (img.channels() != 3) throw InvalidInputError("hue_preserving_gamma: image must have 3 channels");
    if (gamma <= 0.0) throw InvalidInputError("hue_preserving_gamma: gamma must be positive");
    if (gamma == 1.0) return img;
    Image out = img;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double v = std::max({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
            if (v <= 0.0) continue;
            const double ratio = std::pow(v, gamma) / v;
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, c) * ratio;
        }
    }
    return out;
}

}  // namespace pasguide
