#pragma once

#include <stdexcept>
#include <string>

namespace ragcheck {

// Bad input or configuration: retrying the same request cannot succeed.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Environmental failure at run time (provider unreachable, replay cache miss,
// unwritable output path). The request itself was well formed.
class OperationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ragcheck
