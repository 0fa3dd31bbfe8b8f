// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/types.hpp"

#include <limits>

namespace lptvsync {

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
    std::uint64_t out = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
            throw ResourceError("integer power overflows 64 bits");
        }
        out *= base;
    }
    return out;
}

}  // namespace lptvsync
