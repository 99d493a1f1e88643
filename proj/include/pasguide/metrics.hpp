#ifndef PASGUIDE_METRICS_HPP
#define PASGUIDE_METRICS_HPP

#include <string>
#include <vector>

#include "pasguide/image.hpp"

namespace pasguide {

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kDefaultDenoiseSigma = 1.0;

// 10*log10(peak^2 / MSE), capped at 99 dB for identical images.
double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean CIELAB chroma sqrt(a^2 + b^2) over all pixels.
double mean_chroma(const Image& img);

// Population variance of the 3x3 Laplacian response of the (optionally
// denoised) intensity map; reflect padding at the borders.
double laplacian_variance(const Image& img, double denoise_sigma = kDefaultDenoiseSigma);

struct Histogram {
    std::vector<double> edges;  // size bins + 1
    std::vector<long> counts;   // size bins
};

struct DatasetStats {
    struct Row {
        std::string filename;
        double mean_intensity = 0.0;      // 8-bit scale
        double mean_chroma = 0.0;         // CIELAB
        double laplacian_variance = 0.0;  // post-denoise
    };
    std::vector<Row> rows;
    Histogram intensity_hist;  // width-5 bins on [0, 255]
    Histogram chroma_hist;     // width-2 bins on [0, 60]
    Histogram lapvar_hist;     // log-spaced bins
    int files_read = 0;
    int files_skipped = 0;
};

DatasetStats::Row image_stats(const Image& img, const std::string& name,
                              double denoise_sigma = kDefaultDenoiseSigma);

// Per-image stats plus fixed-bin histograms over every readable .png/.jpg in
// the directory (sorted filenames); unreadable files are skipped and counted.
DatasetStats analyze_dataset(const std::string& directory,
                             double denoise_sigma = kDefaultDenoiseSigma, int threads = 1);

DatasetStats aggregate_stats(std::vector<DatasetStats::Row> rows, int files_skipped);

struct Box {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
};

struct CropResult {
    std::vector<Image> crops;
    int dropped = 0;
};

// Crops half-open [x_min,x_max) x [y_min,y_max) boxes clamped to the image;
// degenerate boxes and crops smaller than min_size on either side are dropped
// and counted, never raised.
CropResult crop_faces(const Image& image, const std::vector<Box>& boxes, int min_size);

// CSV rows: filename,x_min,y_min,x_max,y_max (header required).
std::vector<std::pair<std::string, Box>> read_boxes_csv(const std::string& path);

}  // namespace pasguide

#endif
