#pragma once

#include <stdexcept>
#include <string>

namespace bk {

// Bad arguments, shape mismatches, out-of-range parameters. CLI exit code 1.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or missing input data: unreadable files, bad magic bytes,
// truncated payloads, degenerate evaluation inputs. CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bk
