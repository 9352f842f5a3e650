#pragma once

#include <stdexcept>
#include <string>

namespace semoverlap {

enum class ErrorKind {
    io,
    parse,
    empty_vocabulary,
    empty_distribution,
    insufficient_document,
    input,
    alignment,
    empty_profile,
    internal,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::empty_vocabulary: return "empty_vocabulary";
    case ErrorKind::empty_distribution: return "empty_distribution";
    case ErrorKind::insufficient_document: return "insufficient_document";
    case ErrorKind::input: return "input";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::empty_profile: return "empty_profile";
    case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so drivers can map it
/// to an exit code or an error record without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace semoverlap
