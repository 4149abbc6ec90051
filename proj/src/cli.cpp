#include "tcqkd/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcqkd/protocol.hpp"
#include "tcqkd/report.hpp"

namespace tcqkd {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--k", "not an integer: " + item);
    }
    if (used != item.size() || k < 1) throw CLI::ValidationError("--k", "K must be >= 1: " + item);
    ks.push_back(k);
  }
  if (ks.empty()) throw CLI::ValidationError("--k", "empty list");
  return ks;
}

struct RunOptions {
  std::string config_file;
  int m = 2;
  int n = 2;
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  std::string tamper_b = "none";
  std::string tamper_c = "none";
  bool record_polarization = false;
  unsigned workers = 1;
  std::string out_dir;
};

int do_run(const RunOptions& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  ProtocolConfig cfg;
  std::string out_dir;
  try {
    if (!o.config_file.empty()) {
      std::ifstream f(o.config_file);
      if (!f) {
        err << "error: cannot read config file " << o.config_file << "\n";
        return exit_code::kUsage;
      }
      std::stringstream buf;
      buf << f.rdbuf();
      out_dir = report::apply_config(report::parse_key_values(buf.str()), cfg);
    }
    if (cmd.count("--m")) cfg.outer_cycles = o.m;
    if (cmd.count("--n")) cfg.inner_cycles = o.n;
    if (cmd.count("--rounds")) cfg.rounds = o.rounds;
    if (cmd.count("--seed")) cfg.seed = o.seed;
    if (cmd.count("--tamper-b")) cfg.tamper_b = TamperModel::parse(o.tamper_b);
    if (cmd.count("--tamper-c")) cfg.tamper_c = TamperModel::parse(o.tamper_c);
    if (cmd.count("--record-polarization")) cfg.record_polarization = o.record_polarization;
    if (cmd.count("--workers")) cfg.workers = o.workers;
    cfg.validate();
  } catch (const std::logic_error& e) {  // invalid_argument and ContractViolation
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  }

  if (cmd.count("--out")) out_dir = o.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    out_dir = env && *env ? env : "tcqkd_out";
  }

  const SessionResult session = run_session(cfg);

  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);

    const std::vector<std::pair<std::string, std::string>> files{
        {"rounds.csv", report::rounds_csv(session.record)},
        {"summary.json", report::summary_json(cfg, session.record)},
        {"bob.key", report::key_file(session.keys.bob_key)},
        {"charlie.key", report::key_file(session.keys.charlie_key)},
        {"run.conf", report::config_text(cfg)},
    };
    nlohmann::json checksums = nlohmann::json::object();
    for (const auto& [name, body] : files) {
      write_file(fs::path(out_dir) / name, body);
      checksums[name] = "sha256:" + sha256_hex(body);
    }
    const nlohmann::json manifest = {
        {"schema_version", report::kSchemaVersion},
        {"tool", "tcqkd"},
        {"tool_version", kToolVersion},
        {"timestamp", utc_timestamp()},
        {"seed", cfg.seed},
        {"config",
         {{"m", cfg.outer_cycles},
          {"n", cfg.inner_cycles},
          {"rounds", cfg.rounds},
          {"seed", cfg.seed},
          {"tamper_b", cfg.tamper_b.to_string()},
          {"tamper_c", cfg.tamper_c.to_string()},
          {"record_polarization", cfg.record_polarization}}},
        {"outputs", checksums}};
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kIo;
  }

  out << "rounds=" << session.record.rounds.size() << " key_length=" << session.record.sifted_length
      << " kept_fraction=" << report::format_double(session.record.kept_fraction())
      << " qber=" << report::format_double(session.record.qber()) << " out=" << out_dir << "\n";
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tripartite counterfactual QKD simulator", "tcqkd"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // dist
  int dist_bob = 0, dist_charlie = 0, dist_m = 2, dist_n = 2;
  std::string dist_format = "table";
  auto* dist = app.add_subcommand("dist", "Exact outcome distribution for one bit pair");
  dist->add_option("--bob", dist_bob, "Bob's bit")->required()->check(CLI::Range(0, 1));
  dist->add_option("--charlie", dist_charlie, "Charlie's bit")->required()->check(CLI::Range(0, 1));
  dist->add_option("--m", dist_m, "outer cycles")->check(CLI::Range(1, std::numeric_limits<int>::max()));
  dist->add_option("--n", dist_n, "inner cycles")->check(CLI::Range(1, std::numeric_limits<int>::max()));
  dist->add_option("--format", dist_format)->check(CLI::IsMember({"table", "csv", "json"}));

  // run
  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Monte Carlo session with sifting");
  run->add_option("--config", run_opts.config_file, "key = value config file");
  run->add_option("--m", run_opts.m, "outer cycles");
  run->add_option("--n", run_opts.n, "inner cycles");
  run->add_option("--rounds", run_opts.rounds, "number of rounds");
  run->add_option("--seed", run_opts.seed, "64-bit seed");
  run->add_option("--tamper-b", run_opts.tamper_b, "tamper model on arm B, e.g. presence_probe:0.5");
  run->add_option("--tamper-c", run_opts.tamper_c, "tamper model on arm C");
  run->add_flag("--record-polarization", run_opts.record_polarization,
                "record polarization at D1/D2");
  run->add_option("--workers", run_opts.workers, "worker threads")->check(CLI::Range(1u, 1024u));
  run->add_option("--out", run_opts.out_dir,
                  std::string("output directory (default $") + kOutDirEnv + " or ./tcqkd_out)");

  // sweep
  std::string sweep_k;
  std::string sweep_format = "csv";
  auto* sweep = app.add_subcommand("sweep", "Cycle-count sweep at M = N = K");
  sweep->add_option("--k", sweep_k, "comma-separated K values")->required();
  sweep->add_option("--format", sweep_format)->check(CLI::IsMember({"csv", "json"}));

  // audit
  int audit_m = 2, audit_n = 2;
  std::uint64_t audit_rounds = 20000, audit_seed = 1;
  std::string audit_format = "table";
  auto* audit = app.add_subcommand("audit", "Counterfactuality audit");
  audit->add_option("--m", audit_m, "outer cycles")->check(CLI::Range(1, std::numeric_limits<int>::max()));
  audit->add_option("--n", audit_n, "inner cycles")->check(CLI::Range(1, std::numeric_limits<int>::max()));
  audit->add_option("--rounds", audit_rounds, "rounds per probe study");
  audit->add_option("--seed", audit_seed, "seed for probe studies");
  audit->add_option("--format", audit_format)->check(CLI::IsMember({"table", "json"}));

  std::vector<int> ks;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*sweep) ks = parse_k_list(sweep_k);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  if (*dist) {
    const auto d = round_distribution(dist_bob, dist_charlie, dist_m, dist_n);
    if (dist_format == "json") {
      out << report::distribution_json(d, dist_bob, dist_charlie, dist_m, dist_n);
    } else if (dist_format == "csv") {
      out << report::distribution_csv(d, dist_bob, dist_charlie, dist_m, dist_n);
    } else {
      out << report::distribution_table(d, dist_bob, dist_charlie, dist_m, dist_n);
    }
    return exit_code::kOk;
  }
  if (*run) return do_run(run_opts, *run, out, err);
  if (*sweep) {
    const auto rows = sweep_cycles(ks);
    out << (sweep_format == "json" ? report::sweep_json(rows) : report::sweep_csv(rows));
    return exit_code::kOk;
  }
  if (*audit) {
    const auto rep = audit_counterfactuality(audit_m, audit_n, audit_rounds, audit_seed);
    out << (audit_format == "json" ? report::audit_json(rep) : report::audit_text(rep));
    return rep.all_passed() ? exit_code::kOk : exit_code::kAuditFailed;
  }
  return exit_code::kUsage;
}

}  // namespace tcqkd
