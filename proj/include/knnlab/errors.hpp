#ifndef KNNLAB_ERRORS_HPP
#define KNNLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace knnlab {

// Bad arguments: wrong family tag, k > n, invalid parameter ranges.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Invalid configuration: unnormalized measures, missing sampler, bad CLI config.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A construction exceeded a resource cap (e.g. alphabet size blow-up).
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Observed radii fell below the truncated space's resolution.
struct ResolutionError : std::runtime_error {
    explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Lazy sequence comparison ran past the configured depth without disagreeing.
struct DepthExhaustedError : std::runtime_error {
    explicit DepthExhaustedError(const std::string& msg) : std::runtime_error(msg) {}
};

// A checker's stated precondition does not hold (e.g. distance ties present).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// File I/O failure, message carries the path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace knnlab

#endif
