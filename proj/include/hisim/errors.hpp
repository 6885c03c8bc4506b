#pragma once

#include <stdexcept>
#include <string>

namespace hisim {

/// Raised when an input violates a mathematical precondition (energy out of range,
/// invalid polygon, point off the level set, ...). Maps to CLI exit code 2.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for unreadable or unwritable files and malformed configuration documents.
/// Maps to CLI exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hisim
