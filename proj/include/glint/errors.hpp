// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace glint {

// Exit-code contract of the glintforge CLI: 0 success, 2 usage, 3 I/O,
// 4 schema/format violation.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIo = 3,
    kExitSchema = 4,
};

/// Bad flag values or impossible parameter combinations.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing files, truncated payloads, unwritable outputs.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structured-text documents that parse but violate the schema; the message
/// carries the offending field path.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace glint
