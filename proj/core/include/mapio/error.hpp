// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mapio {

enum class ErrorKind {
    Validation,  // malformed input documents, broken invariants
    NotFound,    // unknown id, alias, tool
    Degenerate,  // numerically degenerate geometry
    Unreachable, // no route between endpoints
    Backend,     // chat backend failure
    Runtime,
};

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what): std::runtime_error(what), _kind(kind) {}

    ErrorKind kind() const noexcept { return _kind; }

private:
    ErrorKind _kind;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace mapio
