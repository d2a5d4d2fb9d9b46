#ifndef LPCVT_VERIFY_HPP
#define LPCVT_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace lpcvt {

/// One oracle comparison: `value` must stay within `tolerance` of
/// `expected` (both interpreted per check; most are max-error style with
/// expected 0).
struct VerifyCheck {
    std::string name;
    double expected = 0.0;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    std::uint64_t rng_seed = 20240717;
    bool quick = false;  // reduced sample counts (smoke runs)
    int threads = 0;
};

/// One verification criterion (a group of checks with a runtime budget).
struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0 = no budget
    std::vector<VerifyCheck> checks;
};

/// Runs the full oracle-backed verification suite.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {});

/// Flat check table (for the CLI `verify` report).
std::vector<VerifyCheck> run_verification(const VerifyOptions& opts = {});

std::string format_report(const std::vector<VerifyCheck>& checks);

}  // namespace lpcvt

#endif
