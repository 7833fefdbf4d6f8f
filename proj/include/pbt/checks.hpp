#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pbt {

/// One measured quantity against its tolerance.
struct CheckResult {
    std::string label;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> cases;
    double seconds = 0.0;

    bool pass() const;
    double max_residual() const;
    /// Labels of failing cases, comma separated.
    std::string failures() const;
};

/// gram, induced, fbasis, pseudo, kraus, fidelity, norm, gauge, kraus-encoding,
/// naimark (both scale variants), naimark-compressed, naimark-honest.
const std::vector<std::string>& suite_names();

/// Runs a suite over the given n and d values; throws std::invalid_argument for unknown names.
SuiteReport run_suite(const std::string& suite, const std::vector<int>& ns, const std::vector<int>& ds);

/// Seed of the alternative multiplicity gauge used by the gauge suite.
inline constexpr std::uint64_t kAlternativeGauge = 0x9e3779b97f4a7c15ULL;

}  // namespace pbt
