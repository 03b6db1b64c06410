#pragma once

#include <stdexcept>

namespace swf {

// Error taxonomy shared by the whole library. The CLI maps these onto exit
// codes: format/config/io problems -> 3, trigger design failure -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SizeMismatchError : Error { using Error::Error; };    // shape or extent disagreement
struct DomainError : Error { using Error::Error; };          // non-finite values, out-of-range parameters
struct ConfigError : Error { using Error::Error; };          // model / trojan configuration problems
struct UnsupportedPayloadError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };          // malformed file contents
struct IoError : Error { using Error::Error; };              // unreadable or truncated files
struct EmptyProfileError : Error { using Error::Error; };    // profiling over an empty dataset
struct NoRovError : Error { using Error::Error; };           // no qualifying value range in a profile
struct DesignFailedError : Error { using Error::Error; };    // trigger search budget exhausted

} // namespace swf
