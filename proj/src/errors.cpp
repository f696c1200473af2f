#include "dqls/errors.hpp"

namespace dqls {

ParseError::ParseError(std::size_t line, const std::string &what)
    : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

int exit_code_for(const std::exception &e) noexcept {
    if (dynamic_cast<const ResourceError *>(&e) != nullptr) {
        return 4;
    }
    if (dynamic_cast<const DegenerateError *>(&e) != nullptr) {
        return 3;
    }
    if (dynamic_cast<const ValidationError *>(&e) != nullptr) {
        return 2;
    }
    return 1;
}

} // namespace dqls
