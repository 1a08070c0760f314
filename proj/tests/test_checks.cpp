#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "doctest.h"
#include "qem/checks.hpp"
#include "qem/errors.hpp"
#include "test_util.hpp"

using namespace qem;
using namespace qemtest;

namespace {

const CheckRecord& record_named(const SuiteReport& report, const std::string& name) {
    for (const auto& rec : report.records)
        if (rec.name == name) return rec;
    static const CheckRecord missing{};
    FAIL("no record named ", name);
    return missing;
}

bool gate_runs_over(FieldGate gate, std::uint32_t characteristic) {
    switch (gate) {
    case FieldGate::Any: return true;
    case FieldGate::CharZero: return characteristic == 0;
    case FieldGate::PositiveChar: return characteristic > 0;
    case FieldGate::CharNotTwo: return characteristic != 2;
    }
    return false;
}

} // namespace

TEST_CASE("glob_match: frozen truth table") {
    struct Row {
        const char* pattern;
        const char* text;
        bool matches;
    };
    const Row rows[] = {
        {"*", "", true},
        {"*", "q2.chart-isomorphism", true},
        {"", "", true},
        {"", "a", false},
        {"shastri*", "shastri.quartic-identity", true},
        {"shastri*", "sl2.swap-lift", false},
        {"*lift", "sl2.swap-lift", true},
        {"*lift*", "sl2.triangular-lift", true},
        {"?2.*", "q2.nu-on-quadric", true},
        {"?2.*", "sl2.swap-lift", false},
        {"a*b", "ab", true},
        {"a*b", "axxb", true},
        {"a*b", "axbx", false},
        {"**", "anything", true},
        {"a?c", "abc", true},
        {"a?c", "ac", false},
        {"rho.*-lambda", "rho.classification-returns-lambda", true},
    };
    for (const Row& row : rows) {
        CAPTURE(row.pattern);
        CAPTURE(row.text);
        CHECK(glob_match(row.pattern, row.text) == row.matches);
    }
}

TEST_CASE("registry: names unique, dotted, lowercase; claims present") {
    const auto& checks = builtin_checks();
    CHECK(checks.size() == 29);
    std::set<std::string> names;
    for (const auto& info : checks) {
        CAPTURE(info.name);
        names.insert(info.name);
        CHECK_FALSE(info.claim.empty());
        CHECK(bool(info.run));
        CHECK(info.name.find('.') != std::string::npos);
        const bool well_formed = std::all_of(
            info.name.begin(), info.name.end(), [](unsigned char ch) {
                return std::islower(ch) || std::isdigit(ch) || ch == '.' ||
                       ch == '-';
            });
        CHECK(well_formed);
    }
    CHECK(names.size() == checks.size());
}

TEST_CASE("status wire names") {
    CHECK(status_name(CheckStatus::Pass) == "pass");
    CHECK(status_name(CheckStatus::Fail) == "fail");
    CHECK(status_name(CheckStatus::Skip) == "skip");
}

TEST_CASE("full suite over Q: positive-characteristic checks skip, the rest pass") {
    const auto report = run_checks(FieldDescriptor::rationals());
    const auto& checks = builtin_checks();
    REQUIRE(report.records.size() == checks.size());
    CHECK(report.failed == 0);
    CHECK_FALSE(report.budget_exhausted);
    CHECK(report.all_passed());
    CHECK(report.skipped == 3);
    CHECK(report.passed == 26);
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& rec = report.records[i];
        CAPTURE(rec.name);
        CHECK(rec.name == checks[i].name); // declaration order
        CHECK(rec.milliseconds >= 0.0);
        if (gate_runs_over(checks[i].gate, 0)) {
            CHECK(rec.status == CheckStatus::Pass);
            CHECK_FALSE(rec.detail.empty());
        } else {
            CHECK(rec.status == CheckStatus::Skip);
            CHECK(rec.detail == "needs positive characteristic");
        }
    }
}

TEST_CASE("full suite over F2: char-0-only and odd-characteristic checks skip") {
    const auto report = run_checks(FieldDescriptor::prime_field(2));
    const auto& checks = builtin_checks();
    REQUIRE(report.records.size() == checks.size());
    CHECK(report.failed == 0);
    CHECK(report.all_passed());
    CHECK(report.skipped == 3);
    CHECK(report.passed == 26);
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& rec = report.records[i];
        CAPTURE(rec.name);
        if (gate_runs_over(checks[i].gate, 2))
            CHECK(rec.status == CheckStatus::Pass);
        else
            CHECK(rec.status == CheckStatus::Skip);
    }
    CHECK(record_named(report, "shastri.group-embedding-determinant").detail ==
          "needs characteristic different from 2");
    CHECK(record_named(report, "charp.line-image-equation").status ==
          CheckStatus::Pass);
}

TEST_CASE("full suite over F3: every applicable check passes") {
    const auto report = run_checks(FieldDescriptor::prime_field(3));
    CHECK(report.failed == 0);
    CHECK(report.all_passed());
    CHECK(report.skipped == 2); // the two char-0-only checks
    CHECK(report.passed == 27);
    CHECK(record_named(report, "charp.not-variable-two-sided-inverse").status ==
          CheckStatus::Pass);
}

TEST_CASE("full suite over F5: the inverse replay self-skips") {
    const auto report = run_checks(FieldDescriptor::prime_field(5));
    CHECK(report.failed == 0);
    CHECK(report.all_passed());
    CHECK(report.skipped == 3);
    CHECK(report.passed == 26);
    const auto& rec = record_named(report, "charp.not-variable-two-sided-inverse");
    CHECK(rec.status == CheckStatus::Skip);
    CHECK(rec.detail.find("p in {2, 3}") != std::string::npos);
}

TEST_CASE("filter: glob selection preserves declaration order") {
    const auto report = run_checks(FieldDescriptor::rationals(), "shastri*");
    REQUIRE(report.records.size() == 4);
    CHECK(report.records[0].name == "shastri.cubic-left-inverse");
    CHECK(report.records[1].name == "shastri.quartic-identity");
    CHECK(report.records[2].name == "shastri.closedness-certificate");
    CHECK(report.records[3].name == "shastri.group-embedding-determinant");
    CHECK(report.all_passed());
    CHECK(report.filter == "shastri*");

    const auto gated = run_checks(FieldDescriptor::rationals(), "charp.*");
    REQUIRE(gated.records.size() == 3);
    for (const auto& rec : gated.records) CHECK(rec.status == CheckStatus::Skip);

    const auto none = run_checks(FieldDescriptor::rationals(), "no-such-check*");
    CHECK(none.records.empty());
    CHECK(none.all_passed());
}

TEST_CASE("single-record reruns reproduce the full-suite status") {
    const auto full = run_checks(FieldDescriptor::prime_field(2));
    for (const std::string name :
         {std::string("q2.chart-isomorphism"),
          std::string("rho.classification-returns-lambda"),
          std::string("charp.line-image-equation"),
          std::string("nu.unique-witness-multiplicity")}) {
        const auto solo = run_checks(FieldDescriptor::prime_field(2), name);
        REQUIRE(solo.records.size() == 1);
        CHECK(solo.records[0].status == record_named(full, name).status);
    }
}

TEST_CASE("runner: injected checks exercise failure, throw, budget, and skip paths") {
    const std::vector<CheckInfo> fake = {
        {"inj.pass", "always passes", FieldGate::Any,
         [](const FieldPtr&) { return CheckResult{true, false, "ok"}; }},
        {"inj.fail", "always fails", FieldGate::Any,
         [](const FieldPtr&) { return CheckResult{false, false, "bad residual"}; }},
        {"inj.throw", "throws a library error", FieldGate::Any,
         [](const FieldPtr&) -> CheckResult { throw IdentityFails("boom"); }},
        {"inj.budget", "overruns its budget", FieldGate::Any,
         [](const FieldPtr&) -> CheckResult {
             throw BudgetExceeded("s-pair budget exhausted");
         }},
        {"inj.self-skip", "skips at run time", FieldGate::Any,
         [](const FieldPtr&) { return CheckResult{true, true, "out of range"}; }},
    };
    const auto report = run_checks(fake, FieldDescriptor::rationals());
    REQUIRE(report.records.size() == 5);
    CHECK(report.passed == 1);
    CHECK(report.failed == 3);
    CHECK(report.skipped == 1);
    CHECK(report.budget_exhausted);
    CHECK_FALSE(report.all_passed());
    CHECK(report.records[0].status == CheckStatus::Pass);
    CHECK(report.records[1].status == CheckStatus::Fail);
    CHECK(report.records[1].detail == "bad residual");
    CHECK(report.records[2].status == CheckStatus::Fail);
    CHECK(report.records[2].detail.find("boom") != std::string::npos);
    CHECK(report.records[3].status == CheckStatus::Fail);
    CHECK(report.records[4].status == CheckStatus::Skip);
    CHECK(report.records[4].detail == "out of range");
}

TEST_CASE("runner: unsupported coefficient fields are rejected") {
    const auto kt =
        FieldDescriptor::rational_functions(FieldDescriptor::rationals(), "T");
    CHECK_THROWS_AS(run_checks(kt), UnsupportedField);
    CHECK_THROWS_AS(run_checks(FieldPtr{}), Error);
}
