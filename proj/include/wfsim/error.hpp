#pragma once

#include <stdexcept>
#include <string>

namespace wfsim {

// Raised while parsing workflow, matrix, mask, config or trace text.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message) : std::runtime_error(message) {}

    ParseError(const std::string& message, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message) {}
};

// Raised by the simulation engine when a run cannot proceed or finishes in an
// inconsistent state (deadlock, double dispatch, counter mismatch).
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& message) : std::runtime_error(message) {}
};

} // namespace wfsim
