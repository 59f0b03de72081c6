// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT

#include "canopt/capi.h"

#include <new>
#include <string>
#include <utility>

#include "canopt/runner.hpp"

struct canopt_result {
    int status;
    std::string body;
};

extern "C" {

int canopt_run_json(const char* request_json, canopt_result** out) {
    if (out == nullptr) return CANOPT_INVALID;
    *out = nullptr;
    if (request_json == nullptr) return CANOPT_INVALID;
    try {
        canopt::runner::RunOutput result = canopt::runner::run(request_json);
        *out = new canopt_result{static_cast<int>(result.status), std::move(result.body)};
        return (*out)->status;
    } catch (const std::bad_alloc&) {
        return CANOPT_INTERNAL;
    } catch (...) {
        // runner::run reports failures through its status; anything escaping
        // it is a genuine library defect.
        try {
            *out = new canopt_result{CANOPT_INTERNAL,
                                     "{\"error\": {\"name\": \"Internal\", "
                                     "\"message\": \"unexpected exception\"}}\n"};
        } catch (...) {
            *out = nullptr;
        }
        return CANOPT_INTERNAL;
    }
}

const char* canopt_result_json(const canopt_result* result) {
    return result == nullptr ? nullptr : result->body.c_str();
}

void canopt_result_free(canopt_result* result) { delete result; }

const char* canopt_version(void) { return canopt::runner::version(); }

const char* canopt_status_name(int status) {
    return canopt::runner::status_name(static_cast<canopt::runner::Status>(status));
}

}  // extern "C"
