#ifndef PASGUIDE_CONFIG_HPP
#define PASGUIDE_CONFIG_HPP

#include <map>
#include <string>

#include "pasguide/sampler.hpp"

namespace pasguide {

// Everything a restoration run needs; serialized as a flat key = value file.
struct RunConfig {
    GuidanceConfig guidance;
    double beta_start = kDefaultBetaStart;
    double beta_end = kDefaultBetaEnd;
    std::string predictor = "mixture";  // mixture | exact ("external" reserved)
    std::string gallery;                // directory for the mixture predictor
    std::string reference;              // clean image for the exact predictor
    std::string restorer = "unsharp";   // identity | unsharp ("external" reserved)
    double unsharp_amount = 1.0;
    double unsharp_sigma = 1.0;
    int threads = 1;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// key = value lines; '#' starts a comment. Unknown keys are an error naming
// the key. Later lines override earlier ones.
RunConfig parse_config(const std::map<std::string, std::string>& kv, RunConfig base = RunConfig{});
RunConfig load_config(const std::string& path, RunConfig base = RunConfig{});
std::map<std::string, std::string> read_key_values(const std::string& path);

std::string format_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

const char* injection_mode_name(InjectionMode mode);
const char* retinex_grad_mode_name(RetinexGradMode mode);
InjectionMode parse_injection_mode(const std::string& name);
RetinexGradMode parse_retinex_grad_mode(const std::string& name);

}  // namespace pasguide

#endif
