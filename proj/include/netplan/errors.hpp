#ifndef NETPLAN_ERRORS_HPP
#define NETPLAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netplan {

// Invalid inputs, broken invariants, malformed files.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative scheme failed to reach its tolerance.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / stream failures.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace netplan

#endif
