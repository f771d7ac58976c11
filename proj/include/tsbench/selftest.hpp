#pragma once

#include <iosfwd>

namespace tsbench {

/// Quick invariant suites (gradients against finite differences, Adam
/// recurrences, golden-section contraction, singular values). Prints one line
/// per suite; returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace tsbench
