#pragma once

#include <string>

#include "hsa/audit.hpp"
#include "hsa/runtime.hpp"

namespace hsa {

/// Parsed scenario file. Clusters, users and dataset ids are 1-based in the
/// file and 0-based here.
struct ScenarioConfig {
    std::uint64_t q = 101;
    std::uint64_t seed = 1;
    long lprime = 1;
    Assignment assignment;
    std::vector<int> s2;
    std::vector<int> T;
    std::vector<std::vector<int>> dropouts; ///< explicit per-cluster sets, optional
    long long sweep_cap = 10000;
    int sweep_samples = 1000;
};

/// Grammar: `key = value` lines plus `user U V = k...` dataset lists and
/// optional `drop U = v...` lines; `#` starts a comment. Keys: q, seed, K,
/// lprime, s2, T, sweep_cap, sweep_samples (s2 / T take one integer per
/// cluster). Throws ParseError.
ScenarioConfig parse_config(const std::string& text);

/// Flat text dump of a scheme: header fields, the assignment, then every
/// stored matrix as `matrix NAME rows cols` followed by row-major decimal
/// entries. Byte-stable for a given scheme.
std::string scheme_text(const Scheme& s);

/// Inverse of scheme_text. Derived blocks (F1, the decoder rows, the null
/// basis) are recomputed; dimension disagreements raise ParseError.
Scheme parse_scheme(const std::string& text);

std::string transcript_text(const Scheme& s, const Transcript& t);

std::string report_text(const AuditReport& r);
std::string report_json(const AuditReport& r);

std::string rates_text(const DerivedParams& p, const RateReport& r);
std::string rates_json(const DerivedParams& p, const RateReport& r);

/// Both throw IoError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace hsa
