#pragma once

#include <stdexcept>
#include <string>

namespace depthpipe {

/// Invalid configuration (bad config file, bad CLI flags, inconsistent
/// dimensions declared by a config). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (file format errors, missing
/// files, misaligned matrices). Maps to CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace depthpipe
