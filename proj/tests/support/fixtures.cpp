#include "support/fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fixtures {

Image random_image(Rng& rng, int h, int w, int c, double lo, double hi) {
    Image img(h, w, c);
    for (double& v : img.data()) v = rng.uniform(lo, hi);
    return img;
}

namespace {

double smoothstep(double edge0, double edge1, double x) {
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// 1 inside the ellipse, 0 outside, soft over ~1.5px.
double ellipse_mask(double x, double y, double cx, double cy, double rx, double ry, double soft) {
    const double d = std::hypot((x - cx) / rx, (y - cy) / ry);
    return 1.0 - smoothstep(1.0 - soft, 1.0 + soft, d);
}

}  // namespace

Image synthetic_face(std::uint64_t seed, int size) {
    Rng rng(seed);
    const double skin_r = rng.uniform(0.76, 0.84);
    const double skin_g = rng.uniform(0.58, 0.66);
    const double skin_b = rng.uniform(0.48, 0.56);
    const double bg_top_r = rng.uniform(0.40, 0.48);
    const double bg_top_g = rng.uniform(0.46, 0.54);
    const double bg_top_b = rng.uniform(0.56, 0.64);
    const double cx = rng.uniform(0.46, 0.54);
    const double cy = rng.uniform(0.48, 0.54);
    const double rx = rng.uniform(0.30, 0.36);
    const double ry = rng.uniform(0.38, 0.44);
    const double eye_dx = rng.uniform(0.11, 0.15);
    const double eye_dy = rng.uniform(0.06, 0.10);
    const double mouth_dy = rng.uniform(0.16, 0.20);
    const double mouth_rx = rng.uniform(0.09, 0.13);
    const double tex_phase = rng.uniform(0.0, 6.28);
    const double tex_fx = rng.uniform(2.5, 4.5);
    const double tex_fy = rng.uniform(1.5, 3.5);

    const double soft = 1.5 / size;
    Image img(size, size, 3);
    for (int yi = 0; yi < size; ++yi) {
        for (int xi = 0; xi < size; ++xi) {
            const double x = (xi + 0.5) / size;
            const double y = (yi + 0.5) / size;

            double r = bg_top_r + 0.10 * y;
            double g = bg_top_g + 0.08 * y;
            double b = bg_top_b + 0.06 * y;

            const double face = ellipse_mask(x, y, cx, cy, rx, ry, soft * 2.0);
            r = r + face * (skin_r - r);
            g = g + face * (skin_g - g);
            b = b + face * (skin_b - b);

            for (int side = -1; side <= 1; side += 2) {
                const double eye = ellipse_mask(x, y, cx + side * eye_dx, cy - eye_dy, 0.045, 0.035, soft);
                r = r + eye * (0.12 - r);
                g = g + eye * (0.10 - g);
                b = b + eye * (0.12 - b);
            }
            const double mouth = ellipse_mask(x, y, cx, cy + mouth_dy, mouth_rx, 0.035, soft);
            r = r + mouth * (0.55 - r);
            g = g + mouth * (0.22 - g);
            b = b + mouth * (0.24 - b);

            const double highlight =
                0.06 * std::exp(-((x - cx) * (x - cx) + (y - (cy - 0.18)) * (y - (cy - 0.18))) / 0.02);
            const double texture = 0.02 * std::sin(6.2831853 * (tex_fx * x + tex_fy * y) + tex_phase);

            img.at(yi, xi, 0) = std::clamp(r + highlight + texture, 0.02, 0.98);
            img.at(yi, xi, 1) = std::clamp(g + highlight + texture, 0.02, 0.98);
            img.at(yi, xi, 2) = std::clamp(b + highlight + texture, 0.02, 0.98);
        }
    }
    return img;
}

Image face_variant(const Image& base, double brightness, double blur_sigma, double desat) {
    Image out = base;
    out *= brightness;
    if (blur_sigma > 0.0) out = pasguide::gaussian_blur(out, blur_sigma);
    if (desat > 0.0) {
        const Image gray = pasguide::to_intensity(out);
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                for (int c = 0; c < 3; ++c) {
                    out.at(y, x, c) += desat * (gray.at(y, x, 0) - out.at(y, x, c));
                }
            }
        }
    }
    return out;
}

std::vector<Image> variant_gallery(const Image& base) {
    // The desaturation gap is kept small so the mixture posterior retains a
    // soft blend across the chroma pair at the final timestep; a wide gap
    // collapses it to one member and erases sub-fp-precision guidance effects.
    const double brightness[] = {1.0, 0.72, 0.5, 0.32};
    const double blur[] = {0.0, 1.2};
    const double desat[] = {0.0, 0.25};
    std::vector<Image> gallery;
    gallery.reserve(16);
    for (double b : brightness) {
        for (double bl : blur) {
            for (double d : desat) gallery.push_back(face_variant(base, b, bl, d));
        }
    }
    return gallery;
}

std::vector<Image> brightness_ramp_gallery(const Image& base, int count, double lo, double hi) {
    std::vector<Image> gallery;
    gallery.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double b = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        gallery.push_back(face_variant(base, b, 0.0, 0.0));
    }
    return gallery;
}

Image fd_gradient(const std::function<double(const Image&)>& loss, const Image& x, double step) {
    Image grad(x.height(), x.width(), x.channels());
    Image probe = x;
    for (std::size_t i = 0; i < probe.data().size(); ++i) {
        const double original = probe.data()[i];
        probe.data()[i] = original + step;
        const double up = loss(probe);
        probe.data()[i] = original - step;
        const double down = loss(probe);
        probe.data()[i] = original;
        grad.data()[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double max_rel_err(const Image& analytic, const Image& fd) {
    double num = 0.0;
    double den = 1e-12;
    for (std::size_t i = 0; i < analytic.data().size(); ++i) {
        num = std::max(num, std::fabs(fd.data()[i] - analytic.data()[i]));
        den = std::max(den, std::fabs(analytic.data()[i]));
    }
    return num / den;
}

namespace {

double catmull_rom(double x) {
    x = std::fabs(x);
    if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
    if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
    return 0.0;
}

}  // namespace

Image reference_bicubic(const Image& img, int out_h, int out_w) {
    Image out(out_h, out_w, img.channels());
    const double sy = static_cast<double>(img.height()) / out_h;
    const double sx = static_cast<double>(img.width()) / out_w;
    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            const double src_y = (oy + 0.5) * sy - 0.5;
            const double src_x = (ox + 0.5) * sx - 0.5;
            const int by = static_cast<int>(std::floor(src_y));
            const int bx = static_cast<int>(std::floor(src_x));
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0;
                for (int ky = -1; ky <= 2; ++ky) {
                    for (int kx = -1; kx <= 2; ++kx) {
                        const int py = std::clamp(by + ky, 0, img.height() - 1);
                        const int px = std::clamp(bx + kx, 0, img.width() - 1);
                        acc += catmull_rom(src_y - (by + ky)) * catmull_rom(src_x - (bx + kx)) *
                               img.at(py, px, c);
                    }
                }
                out.at(oy, ox, c) = acc;
            }
        }
    }
    return out;
}

std::string make_temp_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    static std::atomic<int> counter{0};
    const auto dir = fs::temp_directory_path() /
                     ("pasguide_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1)));
    fs::create_directories(dir);
    return dir.string();
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file_bytes: cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::runtime_error("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace fixtures
