#pragma once

#include <stdexcept>
#include <string>

namespace whitneydim {

enum class ErrorKind {
    config,
    resource,
    format,
    io,
    empty_set,
    invalid_params,
    insufficient_data,
    scale_too_fine,
    no_overlap,
    center_not_in_set,
    overflow,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure surfaced by the library. The kind drives the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Exit codes: 0 all suites pass, 1 suite failure, 2 config error, 3 resource limit.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace whitneydim
