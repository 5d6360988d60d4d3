#pragma once

#include <stdexcept>
#include <string>

namespace tweetscope {

/// Exit-code category carried by every library error. The CLI maps these
/// one-to-one onto its process exit status.
enum class ErrorKind : int {
    Usage = 1,    ///< bad flags, bad config, missing files
    Data = 2,     ///< malformed or inconsistent input data
    Numeric = 3,  ///< non-finite values, degenerate fits
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace tweetscope
