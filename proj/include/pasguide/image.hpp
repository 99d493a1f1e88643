#ifndef PASGUIDE_IMAGE_HPP
#define PASGUIDE_IMAGE_HPP

#include <vector>

namespace pasguide {

// Row-major H x W x C grid of doubles, nominal range [0,1]. Values are not
// clamped internally; clamping happens at image save and where an operation
// states it.
class Image {
  public:
    Image() = default;
    Image(int height, int width, int channels, double fill = 0.0);
    Image(int height, int width, int channels, std::vector<double> data);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    int pixel_count() const { return height_ * width_; }
    int element_count() const { return height_ * width_ * channels_; }
    bool empty() const { return data_.empty(); }

    double& at(int y, int x, int c) { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
    double at(int y, int x, int c) const { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Image& other) const {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    double mean() const;
    double min_value() const;
    double max_value() const;
    bool all_finite() const;

    Image& operator+=(const Image& other);
    Image& operator-=(const Image& other);
    Image& operator*=(double s);

  private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

bool operator==(const Image& a, const Image& b);

// a + s*b, elementwise.
Image add_scaled(const Image& a, const Image& b, double s);

Image clamp01(const Image& img);

double max_abs_diff(const Image& a, const Image& b);

// Mean of the RGB channels per pixel; requires a 3-channel image.
Image to_intensity(const Image& img);

// (m - min) / (max - min); a constant map yields all zeros.
Image minmax_norm(const Image& m);

// Separable Gaussian convolution, kernel radius ceil(3*sigma), symmetric
// reflect padding (edge sample repeated). sigma == 0 returns the input.
Image gaussian_blur(const Image& img, double sigma);

// Normalized 1-D Gaussian kernel samples for radius ceil(3*sigma).
std::vector<double> gaussian_kernel(double sigma);

// Adjoint of gaussian_blur under the same reflect padding (transpose of the
// blur matrix), needed when differentiating through the blur.
Image gaussian_blur_adjoint(const Image& img, double sigma);

// Bicubic (Catmull-Rom, a = -0.5) resampling; identical dims return the input.
Image resize(const Image& img, int out_h, int out_w);

// sRGB in [0,1] -> CIELAB (D65).
Image rgb_to_lab(const Image& img);

// Gamma applied to V = max(R,G,B) per pixel with channels rescaled by V'/V,
// so HSV hue and saturation are invariant. Pixels with V == 0 are unchanged.
Image hue_preserving_gamma(const Image& img, double gamma);

// Symmetric reflection of index i into [0, n), repeating the edge sample.
int reflect_index(int i, int n);

}  // namespace pasguide

#endif
