#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qem/field.hpp"

namespace qem {

inline constexpr const char* kToolVersion = "0.1.0";

enum class CheckStatus { Pass, Fail, Skip };

// Lowercase wire name: "pass", "fail", "skip".
std::string status_name(CheckStatus s);

// Ground fields a check is meaningful over.  Gated checks run over matching
// fields and are recorded as skipped over the others.
enum class FieldGate {
    Any,          // every supported field
    CharZero,     // the rationals only
    PositiveChar, // prime fields only
    CharNotTwo,   // any field of characteristic != 2
};

struct CheckResult {
    bool passed = true;
    // Set by a body that discovers at run time that the field's parameters
    // put the instance out of reach (e.g. a prime too large for exhaustive
    // enumeration); recorded as a skip, with `detail` explaining the bound.
    bool skipped = false;
    // Residual, witness, or counterexample summary, printed canonically.
    std::string detail;
};

struct CheckInfo {
    // Stable dotted identifier, e.g. "shastri.quartic-identity"; the
    // verify-paper --filter glob matches against this.
    std::string name;
    // One-line statement of the identity or property being verified.
    std::string claim;
    FieldGate gate = FieldGate::Any;
    std::function<CheckResult(const FieldPtr&)> run;
};

// The full verification suite, in fixed declaration order.  Every body is
// deterministic (fixed seeds) and independent of the others, so any record
// can be reproduced by running its check alone.
const std::vector<CheckInfo>& builtin_checks();

struct CheckRecord {
    std::string name;
    std::string claim;
    CheckStatus status = CheckStatus::Skip;
    std::string detail;
    double milliseconds = 0.0;
};

struct SuiteReport {
    std::string filter;
    std::vector<CheckRecord> records; // declaration order
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;
    // Set when a body aborts through BudgetExceeded (recorded as a failure
    // of that check as well); callers map this to a distinct exit code.
    bool budget_exhausted = false;

    bool all_passed() const { return failed == 0 && !budget_exhausted; }
};

// Shell-style matcher: '*' matches any run, '?' any one character, the rest
// match literally.
bool glob_match(const std::string& pattern, const std::string& text);

// Runs the checks whose name matches `filter` over k (which must be the
// rationals or a prime field; throws UnsupportedField otherwise).
// Char-gated checks that do not apply to k are recorded as skipped; bodies
// that throw are recorded as failed with the exception text as detail.
SuiteReport run_checks(const std::vector<CheckInfo>& checks, const FieldPtr& k,
                       const std::string& filter = "*");
SuiteReport run_checks(const FieldPtr& k, const std::string& filter = "*");

} // namespace qem
