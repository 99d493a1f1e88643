#ifndef PASGUIDE_ERRORS_HPP
#define PASGUIDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pasguide {

struct InvalidInputError : std::invalid_argument {
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

struct SingularityError : std::domain_error {
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pasguide

#endif
