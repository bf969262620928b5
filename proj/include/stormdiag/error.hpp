#pragma once

#include <stdexcept>
#include <string>

namespace stormdiag {

// Single exception type for all precondition and data errors raised by the
// library. Messages name the offending key/file where one exists.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stormdiag
