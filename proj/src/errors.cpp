#include "heatshift/errors.hpp"

namespace heatshift {
namespace {

std::string join(const std::vector<std::string> &lines) {
    std::string out;
    for (const auto &line : lines) {
        if (!out.empty()) {
            out += '\n';
        }
        out += line;
    }
    return out;
}

} // namespace

ValidationError::ValidationError(std::string message)
    : Error{message}, violations_{std::move(message)} {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error{join(violations)}, violations_{std::move(violations)} {}

} // namespace heatshift
