#include "cli_common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "pasguide/errors.hpp"
#include "pasguide/image_io.hpp"

namespace pasguide::cli {

PredictorHandle make_predictor(const RunConfig& cfg) {
    PredictorHandle handle;
    if (cfg.predictor == "mixture") {
        if (cfg.gallery.empty()) {
            throw InvalidInputError("predictor 'mixture' requires a gallery directory (gallery = ...)");
        }
        handle.predictor = std::make_unique<MixturePredictor>(load_gallery(cfg.gallery));
    } else if (cfg.predictor == "exact") {
        if (cfg.reference.empty()) {
            throw InvalidInputError("predictor 'exact' requires a reference image (reference = ...)");
        }
        handle.predictor = std::make_unique<ExactPredictor>(load_image(cfg.reference));
    } else if (cfg.predictor == "external") {
        throw InvalidInputError("predictor 'external' is a reserved extension point and is not implemented");
    } else {
        throw InvalidInputError("unknown predictor '" + cfg.predictor + "' (expected mixture|exact)");
    }
    return handle;
}

std::unique_ptr<Restorer> make_configured_restorer(const RunConfig& cfg) {
    return make_restorer(cfg.restorer, cfg.unsharp_amount, cfg.unsharp_sigma);
}

std::vector<std::string> list_images(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int resolve_threads(int flag_value, const RunConfig& cfg) {
    if (flag_value > 0) return flag_value;
    if (cfg.threads > 1) return cfg.threads;
    if (const char* env = std::getenv("PASGUIDE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return cfg.threads > 0 ? cfg.threads : 1;
}

}  // namespace pasguide::cli
