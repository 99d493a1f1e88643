#ifndef PASGUIDE_TOOLS_CLI_COMMON_HPP
#define PASGUIDE_TOOLS_CLI_COMMON_HPP

#include <memory>
#include <string>
#include <vector>

#include "pasguide/config.hpp"
#include "pasguide/predictors.hpp"
#include "pasguide/sasi.hpp"

namespace pasguide::cli {

// Owns the predictor (and its gallery/reference data) built from a RunConfig.
struct PredictorHandle {
    std::unique_ptr<NoisePredictor> predictor;
};

PredictorHandle make_predictor(const RunConfig& cfg);
std::unique_ptr<Restorer> make_configured_restorer(const RunConfig& cfg);

// Sorted *.png/*.jpg/*.jpeg paths directly inside `dir`.
std::vector<std::string> list_images(const std::string& dir);

std::string format_g6(double v);

int resolve_threads(int flag_value, const RunConfig& cfg);

}  // namespace pasguide::cli

#endif
