// SPDX-License-Identifier: Apache-2.0
//
// Comparison of a run against the values printed with the original proof.

#pragma once

#include "hemicert/local.hpp"
#include "hemicert/search.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hemicert {

enum class Classification { exact_match, expected_deviation, failure };

std::string_view to_string(Classification c);

struct ReportEntry {
    std::string key;        // machine-readable, e.g. "local.J.terms"
    std::string label;      // human-readable
    std::string reference;  // printed value, "-" when there is none
    std::string observed;
    Classification classification = Classification::exact_match;
    std::string note;
};

struct RunReport {
    bool has_local = false;
    bool has_global = false;
    std::string local_digest;  // sha256 of the serialized local certificate
    std::string global_digest;
    std::string mode;          // "paper" or "trustless"
    std::vector<ReportEntry> entries;
    std::vector<std::string> context;  // timings and other non-compared lines

    bool has_failure() const;
    /// Versioned text: a summary line per entry, then a tab-separated table.
    std::string to_text() const;
};

/// SHA-256 of the text, lowercase hex.
std::string sha256_hex(std::string_view text);

/// Either pointer may be null. Entries appear in a fixed order, so equal
/// inputs give byte-identical reports.
RunReport build_report(const LocalCertificate* local, const GlobalCertificate* global);

}  // namespace hemicert
