// nnmetric: query-concurrency cap (NNMETRIC_THREADS). Queries over a shared
// immutable graph are independent; results are always ordered by (i, j), so
// the cap affects throughput only, never output.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdlib>
#include <string>
#include <thread>

namespace nnm {

/// Number of worker threads bulk queries may use: NNMETRIC_THREADS when set
/// to a positive integer, otherwise the hardware concurrency (at least 1).
inline std::size_t thread_cap() {
    if (const char* env = std::getenv("NNMETRIC_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace nnm
