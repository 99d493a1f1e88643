#include "pasguide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pasguide/errors.hpp"
#include "pasguide/image_io.hpp"
#include "pasguide/parallel.hpp"

namespace pasguide {

double psnr(const Image& a, const Image& b, double peak) {
    if (!a.same_shape(b)) throw InvalidInputError("psnr: shape mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        mse += d * d;
    }
    mse /= a.element_count();
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double mean_chroma(const Image& img) {
    const Image lab = rgb_to_lab(img);
    double acc = 0.0;
    for (int y = 0; y < lab.height(); ++y) {
        for (int x = 0; x < lab.width(); ++x) {
            acc += std::hypot(lab.at(y, x, 1), lab.at(y, x, 2));
        }
    }
    return acc / lab.pixel_count();
}

double laplacian_variance(const Image& img, double denoise_sigma) {
    if (denoise_sigma < 0.0) throw InvalidInputError("laplacian_variance: sigma must be non-negative");
    Image gray = img.channels() == 3 ? to_intensity(img) : img;
    gray = gaussian_blur(gray, denoise_sigma);

    const int h = gray.height();
    const int w = gray.width();
    std::vector<double> response(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double up = gray.at(reflect_index(y - 1, h), x, 0);
            const double down = gray.at(reflect_index(y + 1, h), x, 0);
            const double left = gray.at(y, reflect_index(x - 1, w), 0);
            const double right = gray.at(y, reflect_index(x + 1, w), 0);
            response[static_cast<std::size_t>(y) * w + x] =
                up + down + left + right - 4.0 * gray.at(y, x, 0);
        }
    }
    double mean = 0.0;
    for (double v : response) mean += v;
    mean /= static_cast<double>(response.size());
    double var = 0.0;
    for (double v : response) var += (v - mean) * (v - mean);
    return var / static_cast<double>(response.size());
}

DatasetStats::Row image_stats(const Image& img, const std::string& name, double denoise_sigma) {
    DatasetStats::Row row;
    row.filename = name;
    row.mean_intensity = (img.channels() == 3 ? to_intensity(img).mean() : img.mean()) * 255.0;
    row.mean_chroma = img.channels() == 3 ? mean_chroma(img) : 0.0;
    row.laplacian_variance = laplacian_variance(img, denoise_sigma);
    return row;
}

namespace {

Histogram linear_histogram(double lo, double hi, double width, const std::vector<double>& values) {
    const int bins = static_cast<int>(std::ceil((hi - lo) / width));
    Histogram hist;
    hist.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) hist.edges[static_cast<std::size_t>(i)] = lo + width * i;
    hist.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int bin = static_cast<int>(std::floor((v - lo) / width));
        bin = std::clamp(bin, 0, bins - 1);
        ++hist.counts[static_cast<std::size_t>(bin)];
    }
    return hist;
}

Histogram log_histogram(double lo, double hi, int bins, const std::vector<double>& values) {
    Histogram hist;
    hist.edges.resize(static_cast<std::size_t>(bins) + 1);
    const double log_lo = std::log10(lo);
    const double step = (std::log10(hi) - log_lo) / bins;
    for (int i = 0; i <= bins; ++i) {
        hist.edges[static_cast<std::size_t>(i)] = std::pow(10.0, log_lo + step * i);
    }
    hist.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int bin = v <= 0.0 ? 0 : static_cast<int>(std::floor((std::log10(v) - log_lo) / step));
        bin = std::clamp(bin, 0, bins - 1);
        ++hist.counts[static_cast<std::size_t>(bin)];
    }
    return hist;
}

}  // namespace

DatasetStats aggregate_stats(std::vector<DatasetStats::Row> rows, int files_skipped) {
    DatasetStats stats;
    stats.files_read = static_cast<int>(rows.size());
    stats.files_skipped = files_skipped;
    std::vector<double> intensity, chroma, lapvar;
    intensity.reserve(rows.size());
    chroma.reserve(rows.size());
    lapvar.reserve(rows.size());
    for (const auto& row : rows) {
        intensity.push_back(row.mean_intensity);
        chroma.push_back(row.mean_chroma);
        lapvar.push_back(row.laplacian_variance);
    }
    stats.intensity_hist = linear_histogram(0.0, 255.0, 5.0, intensity);
    stats.chroma_hist = linear_histogram(0.0, 60.0, 2.0, chroma);
    stats.lapvar_hist = log_histogram(1e-8, 1e2, 24, lapvar);
    stats.rows = std::move(rows);
    return stats;
}

DatasetStats analyze_dataset(const std::string& directory, double denoise_sigma, int threads) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) throw IoError("analyze_dataset: not a directory: " + directory);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());

    std::vector<DatasetStats::Row> rows(paths.size());
    std::vector<char> ok(paths.size(), 0);
    parallel_for(static_cast<int>(paths.size()), threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            const Image img = load_image(paths[idx]);
            rows[idx] = image_stats(img, fs::path(paths[idx]).filename().string(), denoise_sigma);
            ok[idx] = 1;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n", paths[idx].c_str(), e.what());
        }
    });

    std::vector<DatasetStats::Row> good;
    int skipped = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (ok[i]) {
            good.push_back(std::move(rows[i]));
        } else {
            ++skipped;
        }
    }
    return aggregate_stats(std::move(good), skipped);
}

CropResult crop_faces(const Image& image, const std::vector<Box>& boxes, int min_size) {
    CropResult result;
    for (const Box& box : boxes) {
        const int x0 = std::clamp(box.x_min, 0, image.width());
        const int x1 = std::clamp(box.x_max, 0, image.width());
        const int y0 = std::clamp(box.y_min, 0, image.height());
        const int y1 = std::clamp(box.y_max, 0, image.height());
        const int w = x1 - x0;
        const int h = y1 - y0;
        if (w <= 0 || h <= 0 || std::min(w, h) < min_size) {
            ++result.dropped;
            continue;
        }
        Image crop(h, w, image.channels());
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < image.channels(); ++c) {
                    crop.at(y, x, c) = image.at(y0 + y, x0 + x, c);
                }
            }
        }
        result.crops.push_back(std::move(crop));
    }
    return result;
}

std::vector<std::pair<std::string, Box>> read_boxes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_boxes_csv: cannot open " + path);
    std::vector<std::pair<std::string, Box>> boxes;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) throw IoError("read_boxes_csv: malformed row: " + line);
        Box box{std::stoi(fields[1]), std::stoi(fields[2]), std::stoi(fields[3]), std::stoi(fields[4])};
        boxes.emplace_back(fields[0], box);
    }
    return boxes;
}

}  // namespace pasguide
