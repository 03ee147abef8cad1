#pragma once

#include <stdexcept>
#include <string>

namespace vibrato {

/// Carrier for all library failures; subclasses distinguish CLI exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// File missing, unreadable, or in an unsupported on-disk format.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// Argument outside an operation's mathematical or physical domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// The excerpt does not contain measurable vibrato (too few cycles,
/// constant pitch, ...). Carries a short machine-readable reason slug.
class RejectionError : public Error {
public:
    RejectionError(std::string reason_slug, const std::string& what)
        : Error(what), reason(std::move(reason_slug)) {}

    std::string reason;
};

}  // namespace vibrato
