#include "tcqkd/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tcqkd::report {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json distribution_object(const OutcomeDistribution& d) {
  json probs = json::object();
  for (Terminal t : kTerminals) probs[std::string(to_string(t))] = d[t];
  return probs;
}

std::string_view action_name(Action a) { return a == Action::Pass ? "pass" : "block"; }

}  // namespace

std::string distribution_table(const OutcomeDistribution& d, int bob, int charlie, int m, int n) {
  std::ostringstream os;
  os << "bob=" << bob << " (" << action_name(encode(Party::Bob, bob)) << ")  charlie=" << charlie
     << " (" << action_name(encode(Party::Charlie, charlie)) << ")  M=" << m << " N=" << n << "\n";
  os << "terminal  probability\n";
  for (Terminal t : kTerminals) {
    std::string name(to_string(t));
    name.resize(10, ' ');
    os << name << format_double(d[t]) << "\n";
  }
  os << "total     " << format_double(d.total()) << "\n";
  return os.str();
}

std::string distribution_csv(const OutcomeDistribution& d, int bob, int charlie, int m, int n) {
  std::ostringstream os;
  os << "bob_bit,charlie_bit,m,n,terminal,probability\n";
  for (Terminal t : kTerminals) {
    os << bob << ',' << charlie << ',' << m << ',' << n << ',' << to_string(t) << ','
       << format_double(d[t]) << '\n';
  }
  return os.str();
}

std::string distribution_json(const OutcomeDistribution& d, int bob, int charlie, int m, int n) {
  json j = {{"schema_version", kSchemaVersion},
            {"bob_bit", bob},
            {"charlie_bit", charlie},
            {"m", m},
            {"n", n},
            {"probabilities", distribution_object(d)},
            {"total", d.total()}};
  return j.dump(2) + "\n";
}

std::string rounds_csv(const SessionRecord& record) {
  std::string out = "round,bob_bit,charlie_bit,outcome,kept\n";
  out.reserve(out.size() + record.rounds.size() * 24);
  char buf[32];
  for (const RoundRecord& r : record.rounds) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.round);
    out.append(buf, end);
    out += ',';
    out += static_cast<char>('0' + r.bob_bit);
    out += ',';
    out += static_cast<char>('0' + r.charlie_bit);
    out += ',';
    out += to_string(r.outcome.terminal);
    out += r.kept ? ",1\n" : ",0\n";
  }
  return out;
}

std::string summary_json(const ProtocolConfig& config, const SessionRecord& record) {
  json counts = json::object();
  for (Terminal t : kTerminals) {
    counts[std::string(to_string(t))] = record.counts[static_cast<std::size_t>(t)];
  }
  std::uint64_t fired_b = 0, fired_c = 0;
  json pol = json::object();
  std::uint64_t pol_counts[2][2] = {};
  for (const RoundRecord& r : record.rounds) {
    fired_b += r.outcome.probe_fired_b;
    fired_c += r.outcome.probe_fired_c;
    if (r.outcome.polarization) {
      const int det = r.outcome.terminal == Terminal::D1 ? 0 : 1;
      ++pol_counts[det][static_cast<int>(*r.outcome.polarization)];
    }
  }
  json j = {{"schema_version", kSchemaVersion},
            {"rounds", record.rounds.size()},
            {"m", config.outer_cycles},
            {"n", config.inner_cycles},
            {"seed", config.seed},
            {"tamper_b", config.tamper_b.to_string()},
            {"tamper_c", config.tamper_c.to_string()},
            {"counts", counts},
            {"key_length", record.sifted_length},
            {"kept_fraction", record.kept_fraction()},
            {"mismatches", record.mismatches},
            {"qber", record.qber()},
            {"probe_fired", {{"B", fired_b}, {"C", fired_c}}}};
  if (config.record_polarization) {
    j["polarization_at_detector"] = {
        {"D1", {{"H", pol_counts[0][0]}, {"V", pol_counts[0][1]}}},
        {"D2", {{"H", pol_counts[1][0]}, {"V", pol_counts[1][1]}}}};
  }
  return j.dump(2) + "\n";
}

std::string key_file(std::string_view key) { return std::string(key) + "\n"; }

namespace {

json sweep_row_json(const SweepRow& r) {
  return {{"k", r.cycles},
          {"survival_blocked", r.survival_blocked},
          {"survival_unblocked", r.survival_unblocked},
          {"survival_mean", r.survival_mean},
          {"fidelity_to_v", r.fidelity_to_v},
          {"fidelity_to_h", r.fidelity_to_h},
          {"agree_p_d1", r.agree_p_d1},
          {"agree_p_d2", r.agree_p_d2},
          {"agree_ratio", r.agree_ratio},
          {"kept_fraction", r.kept_fraction},
          {"differ_pass_p_d2", r.differ_pass_p_d2},
          {"differ_block_p_d2", r.differ_block_p_d2}};
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "k,survival_blocked,survival_unblocked,survival_mean,fidelity_to_v,fidelity_to_h,"
        "agree_p_d1,agree_p_d2,agree_ratio,kept_fraction,differ_pass_p_d2,differ_block_p_d2\n";
  for (const SweepRow& r : rows) {
    os << r.cycles;
    for (double x : {r.survival_blocked, r.survival_unblocked, r.survival_mean, r.fidelity_to_v,
                     r.fidelity_to_h, r.agree_p_d1, r.agree_p_d2, r.agree_ratio, r.kept_fraction,
                     r.differ_pass_p_d2, r.differ_block_p_d2}) {
      os << ',' << format_double(x);
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const SweepRow& r : rows) arr.push_back(sweep_row_json(r));
  return json{{"schema_version", kSchemaVersion}, {"rows", arr}}.dump(2) + "\n";
}

std::string audit_text(const AuditReport& report) {
  std::ostringstream os;
  os << "counterfactuality audit  M=" << report.outer_cycles << " N=" << report.inner_cycles
     << "\n\n[assertions] guard detectors that must stay dark (tolerance 1e-9)\n";
  for (const AuditCheck& c : report.checks) {
    os << "  bits=(" << c.bob_bit << "," << c.charlie_bit << ") arm " << to_string(c.arm) << " "
       << action_name(c.action) << "  P(" << to_string(c.detector)
       << ") = " << format_double(c.probability) << "  " << (c.passed ? "PASS" : "FAIL") << "\n";
  }
  os << "\n[assertions] channel accounting at release\n";
  for (const AccountingCheck& a : report.accounting) {
    os << "  bits=(" << a.bob_bit << "," << a.charlie_bit
       << ") channel_residual=" << format_double(a.channel_residual)
       << " survival=" << format_double(a.survival)
       << " guard_total=" << format_double(a.guard_total)
       << " unaccounted=" << format_double(a.unaccounted) << "  " << (a.passed ? "PASS" : "FAIL")
       << "\n";
    if (a.survival < kZeroProbabilityTolerance) os << "    note: survival is 0 at this cycle count\n";
  }
  os << "\n[non-assertive] presence-probe disturbance\n";
  for (const ProbeStudy& p : report.probes) {
    os << "  probe arm " << to_string(p.probed_arm) << " (" << action_name(p.probed_action)
       << ") bits=(" << p.bob_bit << "," << p.charlie_bit << ") rounds=" << p.rounds
       << " fired=" << format_double(p.fired_frequency())
       << " fired_and_click=" << format_double(p.joint_frequency()) << "\n";
  }
  os << "\nresult: " << (report.all_passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string audit_json(const AuditReport& report) {
  json checks = json::array();
  for (const AuditCheck& c : report.checks) {
    checks.push_back({{"bob_bit", c.bob_bit},
                      {"charlie_bit", c.charlie_bit},
                      {"arm", to_string(c.arm)},
                      {"action", action_name(c.action)},
                      {"detector", to_string(c.detector)},
                      {"probability", c.probability},
                      {"passed", c.passed}});
  }
  json accounting = json::array();
  for (const AccountingCheck& a : report.accounting) {
    accounting.push_back({{"bob_bit", a.bob_bit},
                          {"charlie_bit", a.charlie_bit},
                          {"channel_residual", a.channel_residual},
                          {"survival", a.survival},
                          {"guard_total", a.guard_total},
                          {"unaccounted", a.unaccounted},
                          {"passed", a.passed}});
  }
  json probes = json::array();
  for (const ProbeStudy& p : report.probes) {
    probes.push_back({{"probed_arm", to_string(p.probed_arm)},
                      {"probed_action", action_name(p.probed_action)},
                      {"bob_bit", p.bob_bit},
                      {"charlie_bit", p.charlie_bit},
                      {"rounds", p.rounds},
                      {"probe_fired", p.probe_fired},
                      {"fired_and_click", p.fired_and_click},
                      {"joint_frequency", p.joint_frequency()}});
  }
  json j = {{"schema_version", kSchemaVersion},
            {"m", report.outer_cycles},
            {"n", report.inner_cycles},
            {"assertions", {{"guard_detectors", checks}, {"channel_accounting", accounting}}},
            {"probe_disturbance", {{"assertive", false}, {"studies", probes}}},
            {"passed", report.all_passed()}};
  return j.dump(2) + "\n";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size()) {
    throw std::invalid_argument("bad value for '" + key + "': " + value);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("bad boolean for '" + key + "': " + value);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) throw std::invalid_argument("duplicate config key: " + key);
  }
  return kv;
}

std::string apply_config(const std::map<std::string, std::string>& kv, ProtocolConfig& config) {
  std::string out_dir;
  for (const auto& [key, value] : kv) {
    if (key == "m") {
      config.outer_cycles = parse_number<int>(key, value);
    } else if (key == "n") {
      config.inner_cycles = parse_number<int>(key, value);
    } else if (key == "rounds") {
      config.rounds = parse_number<std::uint64_t>(key, value);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "tamper_b") {
      config.tamper_b = TamperModel::parse(value);
    } else if (key == "tamper_c") {
      config.tamper_c = TamperModel::parse(value);
    } else if (key == "record_polarization") {
      config.record_polarization = parse_bool(key, value);
    } else if (key == "workers") {
      config.workers = parse_number<unsigned>(key, value);
    } else if (key == "out") {
      out_dir = value;
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  return out_dir;
}

std::string config_text(const ProtocolConfig& config) {
  std::ostringstream os;
  os << "m = " << config.outer_cycles << "\n"
     << "n = " << config.inner_cycles << "\n"
     << "rounds = " << config.rounds << "\n"
     << "seed = " << config.seed << "\n"
     << "tamper_b = " << config.tamper_b.to_string() << "\n"
     << "tamper_c = " << config.tamper_c.to_string() << "\n"
     << "record_polarization = " << (config.record_polarization ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace tcqkd::report
