#pragma once

#include <stdexcept>
#include <string>

namespace ssim {

// Simulation could not make progress: active work remains but no future
// event (arrival, completion, watch crossing) is reachable.
class stall_error : public std::runtime_error {
public:
    explicit stall_error(const std::string& what) : std::runtime_error(what) {}
};

// Event count exceeded the configured guard.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// A policy that needs remaining-work information was given hidden sizes.
class clairvoyance_error : public std::runtime_error {
public:
    explicit clairvoyance_error(const std::string& what) : std::runtime_error(what) {}
};

// Inputs that cannot be compared or combined (e.g. traces of different instances).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// An internally constructed schedule failed its own feasibility requirements.
class feasibility_error : public std::runtime_error {
public:
    explicit feasibility_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ssim
