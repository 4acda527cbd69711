#pragma once
#include <stdexcept>
#include <string>

namespace ksmix {

// Bad parameters, bad config files, bad field data supplied by the caller.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates a documented precondition (NaN samples, wrong sizes, ...).
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem problems surfaced by the harness.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A mathematically guaranteed inequality failed beyond tolerance; indicates an
// implementation bug, never bad user input.
struct verification_error : std::runtime_error {
    explicit verification_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ksmix
