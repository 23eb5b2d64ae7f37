#pragma once

#include <stdexcept>
#include <string>

namespace attmatch {

/// Error type thrown by every attmatch operation. Messages carry enough
/// context (file, line number, offending value) to be printed verbatim.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace attmatch
