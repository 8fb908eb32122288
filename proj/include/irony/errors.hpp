#pragma once

#include <stdexcept>
#include <string>

namespace irony {

// Bad user input (malformed files, missing resources, violated preconditions).
// The CLI maps this to exit code 1.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant; exit code 2 from the CLI.
struct invariant_error : std::logic_error {
  explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace irony
