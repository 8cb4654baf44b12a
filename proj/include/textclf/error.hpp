#pragma once

#include <stdexcept>
#include <string>

namespace textclf {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace textclf
