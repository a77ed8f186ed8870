#pragma once

#include <stdexcept>
#include <string>

namespace perceptlab {

// Error taxonomy mapped to process exit codes by the CLI:
//   config 2, data 3, numeric 4, io 5.
enum class ErrorKind { config = 2, data = 3, numeric = 4, io = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::config, msg) {}
};
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(ErrorKind::data, msg) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(ErrorKind::numeric, msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

}  // namespace perceptlab
