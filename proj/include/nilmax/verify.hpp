#pragma once

#include <string>
#include <vector>

#include "nilmax/pipeline.hpp"

namespace nilmax {

struct VerifyEntry {
    std::string module;
    std::string name;
    std::string status;  // pass | fail | structural
    double measured = 0.0;
    double tolerance = 0.0;
    std::string fixture;
    std::string detail;
    double seconds = 0.0;

    bool passed() const { return status != "fail"; }
};

struct VerifyReport {
    std::vector<VerifyEntry> entries;
    double seconds = 0.0;

    bool all_passed() const;
};

// Identifiers ("module/name") the suite must report, each exactly once.
const std::vector<std::string>& verify_catalog();

VerifyReport run_verify_suite();
json verify_report_json(const VerifyReport& r);

}  // namespace nilmax
