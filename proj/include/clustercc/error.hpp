/**
 * @file error.hpp
 * @brief Error type carrying a machine-readable code alongside the message.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace clustercc {

/// Every validation failure in the engine is reported through this type.
/// The code is a short CamelCase identifier such as "TwoCycleAtK".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace clustercc
