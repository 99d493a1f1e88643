#ifndef PASGUIDE_GRADCHECK_HPP
#define PASGUIDE_GRADCHECK_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pasguide/image.hpp"

namespace pasguide::gradcheck {

inline constexpr double kFdStep = 1e-4;

struct CheckResult {
    std::string name;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

using LossFn = std::function<double(const Image&)>;

// Central differences (f(x+h*e) - f(x-h*e)) / 2h per element.
Image finite_difference(const LossFn& loss, const Image& x, double step = kFdStep);

// max|fd - analytic| / max(max|analytic|, 1e-12)
double relative_error(const Image& analytic, const Image& fd);

// Compares an analytic gradient against central differences of the loss.
CheckResult check_gradient(const std::string& name, const LossFn& loss, const Image& analytic,
                           const Image& x, double tolerance, double step = kFdStep);

// All gradient families (exposure, reflectance frozen-L, structural frozen
// target, MSE injection, weighted total) on `trials` random 8x8x3 inputs each.
std::vector<CheckResult> run_suite(std::uint64_t seed, int trials = 20);

}  // namespace pasguide::gradcheck

#endif
