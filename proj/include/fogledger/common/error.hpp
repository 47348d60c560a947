#pragma once

#include <stdexcept>
#include <string>

namespace fogledger {

/// Exception carrying a module-specific error code. Used for precondition
/// violations; expected failure outcomes are returned as values instead.
template <class Code>
class DomainError : public std::runtime_error {
public:
    DomainError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

}  // namespace fogledger
