/* Copyright 2026 canopt developers
 * SPDX-License-Identifier: MIT
 *
 * C interface to the canopt solver library.
 *
 * Every entry point exchanges JSON strings: callers submit a request
 * document and receive a result document through an opaque handle. The
 * request schema is documented in the repository README; the result is
 * either a solver payload or an {"error": {...}} document, matching the
 * returned status code.
 */
#ifndef CANOPT_CAPI_H
#define CANOPT_CAPI_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by canopt_run_json. */
#define CANOPT_OK 0         /* request solved; result holds the payload    */
#define CANOPT_INFEASIBLE 1 /* well-formed request with no feasible answer */
#define CANOPT_INVALID 2    /* malformed request or invalid problem data   */
#define CANOPT_INTERNAL 3   /* unexpected failure inside the library       */

/* Opaque result handle owning the response document. */
typedef struct canopt_result canopt_result;

/* Runs a JSON request and stores the response in *out.
 *
 * Returns one of the CANOPT_* status codes. On every return except an
 * allocation failure or null argument, *out receives a handle that must be
 * released with canopt_result_free; on CANOPT_INFEASIBLE / CANOPT_INVALID /
 * CANOPT_INTERNAL the handle carries a structured error document. When
 * request_json or out is null the function returns CANOPT_INVALID and no
 * handle is produced. */
int canopt_run_json(const char* request_json, canopt_result** out);

/* Borrowed pointer to the NUL-terminated response document; valid until the
 * handle is freed. Returns null for a null handle. */
const char* canopt_result_json(const canopt_result* result);

/* Releases a result handle; null is ignored. */
void canopt_result_free(canopt_result* result);

/* Library version string, e.g. "1.0.0". */
const char* canopt_version(void);

/* Short lowercase name for a CANOPT_* status code. */
const char* canopt_status_name(int status);

#ifdef __cplusplus
}
#endif

#endif /* CANOPT_CAPI_H */
