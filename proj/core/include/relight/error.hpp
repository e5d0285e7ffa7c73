#pragma once

#include <stdexcept>
#include <string>

namespace relight {

// Error classes map one-to-one onto CLI exit codes.
enum class ErrorCode : int {
    InvalidInput = 2,  // bad arguments, malformed data, contract violations
    IoError = 3,       // missing files, unreadable/unwritable paths
    SceneParse = 4,    // scene description validation failures
    StageFailure = 5,  // pipeline stage aborted
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

inline Error invalid_input(const std::string& what) {
    return Error(ErrorCode::InvalidInput, what);
}
inline Error io_error(const std::string& what) {
    return Error(ErrorCode::IoError, what);
}
inline Error scene_parse_error(const std::string& what) {
    return Error(ErrorCode::SceneParse, what);
}
inline Error stage_failure(const std::string& what) {
    return Error(ErrorCode::StageFailure, what);
}

}  // namespace relight
