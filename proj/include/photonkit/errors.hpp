#pragma once

#include <stdexcept>
#include <string>

namespace photonkit {

// Error taxonomy shared by the library and the CLI. Each class carries a
// stable exit code so shell callers can distinguish failure modes.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

struct FormatError : Error {
    explicit FormatError(const std::string& m) : Error(m, 2) {}
};
struct IntegrityError : Error {
    explicit IntegrityError(const std::string& m) : Error(m, 3) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(m, 4) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(m, 5) {}
};
struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& m) : Error(m, 6) {}
};
struct DegenerateFitError : Error {
    explicit DegenerateFitError(const std::string& m) : Error(m, 7) {}
};
struct ChannelError : Error {
    explicit ChannelError(const std::string& m) : Error(m, 8) {}
};
struct CoverageError : Error {
    explicit CoverageError(const std::string& m) : Error(m, 9) {}
};
struct NoPeakError : Error {
    explicit NoPeakError(const std::string& m) : Error(m, 10) {}
};
struct ModelCoverageError : Error {
    explicit ModelCoverageError(const std::string& m) : Error(m, 11) {}
};
struct UndefinedNormalizationError : Error {
    explicit UndefinedNormalizationError(const std::string& m) : Error(m, 12) {}
};

}  // namespace photonkit
