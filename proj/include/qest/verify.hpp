#pragma once

// Randomized property suites behind `qest verify`.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qest {

struct SuiteResult {
  std::string suite;
  int cases = 0;
  int failures = 0;
  /// Worst violation seen (0 when every check held with margin).
  double max_discrepancy = 0.0;
  std::vector<std::string> diagnostics;  // one line per failed case

  bool pass() const noexcept { return failures == 0; }
};

/// Precision chain, K bound and mixed-state QFI <= 4 Var(K) on random probes
/// (N <= 3 qubits, k <= N, up to 3 aux segments, 0-2 qubit ancillas).
SuiteResult verify_chain(int cases, std::uint64_t seed);

/// Measured-control vs coherent-control circuits.
SuiteResult verify_deferred_suite(int cases, std::uint64_t seed);

/// Seminorm subadditivity, unitary invariance, shift/scale behaviour and the
/// variance bound with its maximizer.
SuiteResult verify_seminorm(int cases, std::uint64_t seed);

/// Dispatch by name: chain | deferred | seminorm. Throws InvalidArgument otherwise.
SuiteResult run_suite(std::string_view name, int cases, std::uint64_t seed);

}  // namespace qest
