// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Problem-file runner: accepts one JSON request describing a solve, an
// oracle search, or an invariant check, and produces a JSON result. This is
// the single entry point wrapped by the C API and the command-line tool.

#pragma once

#include <string>

namespace canopt::runner {

enum class Status : int {
    Ok = 0,        // body is a result document
    Infeasible = 1,  // solver reported an infeasible or degenerate problem
    Invalid = 2,   // malformed request or invalid problem data
    Internal = 3,  // unexpected failure
};

struct RunOutput {
    Status status = Status::Ok;
    std::string body;  // result JSON on Ok, {"error": {...}} otherwise
};

// Execute one request. Request schema (kind selects the payload):
//   {"kind": "dopt" | "robust" | "maximin" | "oracle" | "check",
//    "spec": {...}, "options": {...}, ...}
RunOutput run(const std::string& request_json);

const char* status_name(Status s);
const char* version();

}  // namespace canopt::runner
