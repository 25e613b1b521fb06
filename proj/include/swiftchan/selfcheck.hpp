// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_SELFCHECK_HPP
#define SWIFTCHAN_SELFCHECK_HPP

#include <string>
#include <vector>

namespace swiftchan {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Quick built-in verification suite: codebook algebra, the sensing-matrix
// identity, denoiser-vs-quadrature agreement, estimator sanity on a
// well-posed stack, and the aligned-beam rate formula. Seconds, not minutes.
std::vector<CheckResult> run_selftests();

} // namespace swiftchan

#endif
