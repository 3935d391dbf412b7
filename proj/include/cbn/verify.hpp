// Verification suites: each runs a family of instances and reports one
// outcome per instance.

#ifndef CBN_VERIFY_HPP
#define CBN_VERIFY_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbn {

struct VerifyOptions {
    std::optional<std::string> census;        // restrict to one built-in diagram
    std::optional<std::vector<int>> colours;  // restrict to one colouring
    int max_colour = -1;                      // -1: the suite's default
    int guard = -1;                           // -1: cube_guard()
};

enum class Outcome { Pass, Fail, Skipped };

struct InstanceResult {
    std::string instance;
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<InstanceResult> results;

    std::size_t count(Outcome o) const;
    // No failures and at least one instance run.
    bool passed() const;
    std::string summary() const;
    std::string str() const;
};

const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown suite or census name.
SuiteReport run_suite(std::string_view name, const VerifyOptions& opt = {});

}  // namespace cbn

#endif
