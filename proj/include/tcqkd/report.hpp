// Text renderings of distributions, sessions, sweeps and audits, plus the
// flat key = value run configuration format.
//
// Floating point values in CSV and tables use 17 significant digits. JSON
// documents carry "schema_version": 1.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tcqkd/protocol.hpp"

namespace tcqkd::report {

inline constexpr int kSchemaVersion = 1;

/// %.17g
std::string format_double(double x);

std::string distribution_table(const OutcomeDistribution& d, int bob, int charlie, int m, int n);
std::string distribution_csv(const OutcomeDistribution& d, int bob, int charlie, int m, int n);
std::string distribution_json(const OutcomeDistribution& d, int bob, int charlie, int m, int n);

/// Columns: round,bob_bit,charlie_bit,outcome,kept. Header row, LF line ends.
std::string rounds_csv(const SessionRecord& record);
std::string summary_json(const ProtocolConfig& config, const SessionRecord& record);
/// One line of '0'/'1' characters.
std::string key_file(std::string_view key);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

std::string audit_text(const AuditReport& report);
std::string audit_json(const AuditReport& report);

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped. Throws std::invalid_argument on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies recognized keys (m, n, rounds, seed, tamper_b, tamper_c,
/// record_polarization, workers) to `config`; returns the value of `out` if
/// present. Unknown keys or bad values throw std::invalid_argument.
std::string apply_config(const std::map<std::string, std::string>& kv, ProtocolConfig& config);

/// Inverse of apply_config for the config fields.
std::string config_text(const ProtocolConfig& config);

}  // namespace tcqkd::report
