#pragma once

#include <stdexcept>
#include <string>

namespace cctvx {

// Process exit codes shared between the library's error types and the
// command-line front end.
enum class ExitCode : int {
    ok = 0,
    failure = 1,
    missing_file = 2,
    invalid_camera_db = 3,
    invalid_config = 4,
    invalid_gpx = 5,
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual ~Error() = default;
    virtual ExitCode exit_code() const { return ExitCode::failure; }
};

// A required input file is missing or unreadable.
struct FileError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::missing_file; }
};

// The camera database failed to load or validate.
struct CameraDbError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::invalid_camera_db; }
};

// A run-wide configuration value is out of range or inconsistent.
struct ConfigError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::invalid_config; }
};

// A GPX document is malformed or fails schema-level checks.
struct GpxError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::invalid_gpx; }
};

// A GPX document parsed but violates semantic constraints
// (coordinate ranges, timestamp ordering, ...).
struct ValidationError : GpxError {
    using GpxError::GpxError;
};

}  // namespace cctvx
