#include "tcqkd/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "tcqkd/optics.hpp"

namespace tcqkd {

BitEncoding BitEncoding::of(Party party, int bit) { return {party, bit, encode(party, bit)}; }

Action encode(Party party, int bit) {
  if (bit != 0 && bit != 1) throw ContractViolation("bits must be 0 or 1");
  const bool pass = (party == Party::Bob) ? bit == 0 : bit == 1;
  return pass ? Action::Pass : Action::Block;
}

DetectorId detector_of(Terminal t) {
  switch (t) {
    case Terminal::D1: return DetectorId::D1;
    case Terminal::D2: return DetectorId::D2;
    case Terminal::D3B: return DetectorId::D3B;
    case Terminal::D3C: return DetectorId::D3C;
    case Terminal::D4B: return DetectorId::D4B;
    case Terminal::D4C: return DetectorId::D4C;
  }
  return DetectorId::D1;
}

std::string_view to_string(Terminal t) { return to_string(detector_of(t)); }

std::optional<Terminal> terminal_from_string(std::string_view s) {
  for (Terminal t : kTerminals) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

double OutcomeDistribution::total() const {
  double sum = 0.0;
  for (double x : p) sum += x;
  return sum;
}

TamperModel TamperModel::parse(std::string_view text) {
  TamperModel m;
  std::string_view kind = text;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    kind = text.substr(0, colon);
    const std::string_view prob = text.substr(colon + 1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(prob.data(), prob.data() + prob.size(), value);
    if (ec != std::errc{} || end != prob.data() + prob.size() || !(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("tamper probability must be a number in [0,1]: " +
                                  std::string(text));
    }
    m.probability = value;
  }
  if (kind == "none") {
    m.kind = Kind::None;
  } else if (kind == "block_always") {
    m.kind = Kind::BlockAlways;
  } else if (kind == "presence_probe") {
    m.kind = Kind::PresenceProbe;
  } else if (kind == "pol_flip") {
    m.kind = Kind::PolFlip;
  } else {
    throw std::invalid_argument("unknown tamper model: " + std::string(text));
  }
  return m;
}

std::string TamperModel::to_string() const {
  std::string name;
  switch (kind) {
    case Kind::None: return "none";
    case Kind::BlockAlways: name = "block_always"; break;
    case Kind::PresenceProbe: name = "presence_probe"; break;
    case Kind::PolFlip: name = "pol_flip"; break;
  }
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, probability);
  return name + ":" + std::string(buf, end);
}

void ProtocolConfig::validate() const {
  if (outer_cycles < 1 || inner_cycles < 1) throw ContractViolation("M and N must be >= 1");
  if (rounds < 1) throw ContractViolation("rounds must be >= 1");
  for (const TamperModel* t : {&tamper_b, &tamper_c}) {
    if (!(t->probability >= 0.0 && t->probability <= 1.0)) {
      throw ContractViolation("tamper probability must lie in [0,1]");
    }
  }
}

double SessionRecord::kept_fraction() const {
  return rounds.empty() ? 0.0
                        : static_cast<double>(sifted_length) / static_cast<double>(rounds.size());
}

double SessionRecord::qber() const {
  return sifted_length ? static_cast<double>(mismatches) / static_cast<double>(sifted_length) : 0.0;
}

PhotonState evolve_round(Action bob, Action charlie, int outer_cycles, int inner_cycles,
                         const ChannelHook& hook) {
  PhotonState state = michelson_split(new_state(ModeLabel::SourcePort, Polarization::H));
  state = cqze_evolve(std::move(state),
                      {outer_cycles, inner_cycles, bob == Action::Block, Arm::B}, hook);
  state = cqze_evolve(std::move(state),
                      {outer_cycles, inner_cycles, charlie == Action::Block, Arm::C}, hook);
  return michelson_recombine(std::move(state));
}

OutcomeDistribution distribution_of(const PhotonState& released) {
  OutcomeDistribution d;
  d[Terminal::D1] = released.mode_probability(ModeLabel::ExitPort1);
  d[Terminal::D2] = released.mode_probability(ModeLabel::ExitPort2);
  for (Terminal t : {Terminal::D3B, Terminal::D3C, Terminal::D4B, Terminal::D4C}) {
    d[t] = released.ledger(detector_of(t));
  }
  return d;
}

OutcomeDistribution round_distribution(int bob_bit, int charlie_bit, int outer_cycles,
                                       int inner_cycles) {
  return distribution_of(evolve_round(encode(Party::Bob, bob_bit),
                                      encode(Party::Charlie, charlie_bit), outer_cycles,
                                      inner_cycles));
}

namespace {

constexpr std::size_t action_index(Action bob, Action charlie) {
  return (bob == Action::Block ? 2u : 0u) + (charlie == Action::Block ? 1u : 0u);
}

Terminal sample_terminal(const OutcomeDistribution& d, double draw) {
  double cum = 0.0;
  std::optional<Terminal> last_nonzero;
  for (Terminal t : kTerminals) {
    if (d[t] <= 0.0) continue;
    cum += d[t];
    last_nonzero = t;
    if (draw < cum) return t;
  }
  // Rounding left the cumulative sum a hair under 1.
  return last_nonzero.value_or(Terminal::D2);
}

}  // namespace

RoundSampler::RoundSampler(const ProtocolConfig& config) : config_(config) {
  if (config.outer_cycles < 1 || config.inner_cycles < 1) {
    throw ContractViolation("M and N must be >= 1");
  }
  for (Action b : {Action::Pass, Action::Block}) {
    for (Action c : {Action::Pass, Action::Block}) {
      released_[action_index(b, c)] =
          evolve_round(b, c, config.outer_cycles, config.inner_cycles);
    }
  }
}

const PhotonState& RoundSampler::cached(Action bob, Action charlie) const {
  return released_[action_index(bob, charlie)];
}

RoundOutcome RoundSampler::sample(int bob_bit, int charlie_bit, RoundStream& stream) const {
  std::array<Action, 2> action{encode(Party::Bob, bob_bit), encode(Party::Charlie, charlie_bit)};
  std::array<bool, 2> probe{};
  std::array<bool, 2> flip{};

  for (Arm arm : kArms) {
    const TamperModel& t = config_.tamper(arm);
    // Always consume the activation draw so stream positions do not depend on
    // the tamper setting of the other arm.
    const double u = stream.next();
    if (!t.active() || !(u < t.probability)) continue;
    const auto i = static_cast<std::size_t>(arm);
    switch (t.kind) {
      case TamperModel::Kind::BlockAlways: action[i] = Action::Block; break;
      case TamperModel::Kind::PresenceProbe: probe[i] = true; break;
      case TamperModel::Kind::PolFlip: flip[i] = true; break;
      case TamperModel::Kind::None: break;
    }
  }

  RoundOutcome out;
  PhotonState evolved;
  if (probe[0] || probe[1] || flip[0] || flip[1]) {
    const ChannelHook hook = [&](PhotonState& s, Arm arm) {
      const auto i = static_cast<std::size_t>(arm);
      if (flip[i]) s = pockels_cell(std::move(s), channel(arm), true);
      if (probe[i]) {
        auto r = decohere_presence(s, channel(arm), stream.next());
        s = std::move(r.state);
        if (r.present) (arm == Arm::B ? out.probe_fired_b : out.probe_fired_c) = true;
      }
    };
    evolved = evolve_round(action[0], action[1], config_.outer_cycles, config_.inner_cycles, hook);
  } else {
    evolved = cached(action[0], action[1]);
  }

  out.terminal = sample_terminal(distribution_of(evolved), stream.next());
  if (config_.record_polarization &&
      (out.terminal == Terminal::D1 || out.terminal == Terminal::D2)) {
    const ModeLabel port = out.terminal == Terminal::D1 ? ModeLabel::ExitPort1 : ModeLabel::ExitPort2;
    const double p_here = evolved.mode_probability(port);
    const double p_h = p_here > 0.0 ? std::norm(evolved.amplitude(port, Polarization::H)) / p_here : 0.0;
    out.polarization = stream.next() < p_h ? Polarization::H : Polarization::V;
  }
  return out;
}

RoundOutcome run_round(int bob_bit, int charlie_bit, const ProtocolConfig& config,
                       RoundStream& stream) {
  return RoundSampler(config).sample(bob_bit, charlie_bit, stream);
}

SiftedKeys sift(const std::vector<RoundRecord>& records) {
  SiftedKeys keys;
  for (const RoundRecord& r : records) {
    if (r.outcome.terminal != Terminal::D1) continue;
    keys.bob_key.push_back(r.bob_bit ? '1' : '0');
    keys.charlie_key.push_back(r.charlie_bit ? '1' : '0');
    keys.kept_round_indices.push_back(r.round);
  }
  return keys;
}

SessionResult run_session(const ProtocolConfig& config) {
  config.validate();
  const RoundSampler sampler(config);
  const CounterRng rng(config.seed);

  SessionResult result;
  auto& rounds = result.record.rounds;
  rounds.resize(config.rounds);

  auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      RoundStream stream(rng, i);
      RoundRecord& r = rounds[i];
      r.round = i;
      r.bob_bit = stream.next_bit();
      r.charlie_bit = stream.next_bit();
      r.outcome = sampler.sample(r.bob_bit, r.charlie_bit, stream);
      r.kept = r.outcome.terminal == Terminal::D1;
    }
  };

  const std::uint64_t workers =
      std::clamp<std::uint64_t>(config.workers, 1, std::max<std::uint64_t>(1, config.rounds));
  if (workers == 1) {
    fill(0, config.rounds);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (config.rounds + workers - 1) / workers;
    for (std::uint64_t lo = 0; lo < config.rounds; lo += chunk) {
      pool.emplace_back(fill, lo, std::min(config.rounds, lo + chunk));
    }
  }

  auto& rec = result.record;
  for (const RoundRecord& r : rounds) {
    ++rec.counts[static_cast<std::size_t>(r.outcome.terminal)];
    if (r.kept) {
      ++rec.sifted_length;
      if (r.bob_bit != r.charlie_bit) ++rec.mismatches;
    }
  }
  result.keys = sift(rounds);
  return result;
}

// Audit ---------------------------------------------------------------------

bool AuditReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; }) &&
         std::all_of(accounting.begin(), accounting.end(),
                     [](const AccountingCheck& c) { return c.passed; });
}

AuditReport audit_counterfactuality(int outer_cycles, int inner_cycles,
                                    std::uint64_t probe_rounds, std::uint64_t seed) {
  if (outer_cycles < 1 || inner_cycles < 1) throw ContractViolation("M and N must be >= 1");
  AuditReport report;
  report.outer_cycles = outer_cycles;
  report.inner_cycles = inner_cycles;

  for (int b = 0; b <= 1; ++b) {
    for (int c = 0; c <= 1; ++c) {
      const std::array<Action, 2> action{encode(Party::Bob, b), encode(Party::Charlie, c)};
      const PhotonState released = evolve_round(action[0], action[1], outer_cycles, inner_cycles);

      for (Arm arm : kArms) {
        AuditCheck chk;
        chk.bob_bit = b;
        chk.charlie_bit = c;
        chk.arm = arm;
        chk.action = action[static_cast<std::size_t>(arm)];
        chk.detector = chk.action == Action::Block ? d3(arm) : d4(arm);
        chk.probability = released.ledger(chk.detector);
        chk.passed = chk.probability <= kZeroProbabilityTolerance;
        report.checks.push_back(chk);
      }

      AccountingCheck acc;
      acc.bob_bit = b;
      acc.charlie_bit = c;
      acc.channel_residual = released.mode_probability(ModeLabel::ChannelB) +
                             released.mode_probability(ModeLabel::ChannelC);
      acc.survival = released.mode_probability(ModeLabel::ExitPort1) +
                     released.mode_probability(ModeLabel::ExitPort2);
      for (Arm arm : kArms) acc.guard_total += released.ledger(d3(arm)) + released.ledger(d4(arm));
      acc.unaccounted = std::abs(1.0 - acc.survival - acc.guard_total);
      acc.passed = acc.channel_residual == 0.0 && acc.unaccounted <= kConservationTolerance;
      report.accounting.push_back(acc);
    }
  }

  std::uint64_t study = 0;
  for (Arm probed : kArms) {
    for (int b = 0; b <= 1; ++b) {
      for (int c = 0; c <= 1; ++c) {
        ProtocolConfig cfg;
        cfg.outer_cycles = outer_cycles;
        cfg.inner_cycles = inner_cycles;
        (probed == Arm::B ? cfg.tamper_b : cfg.tamper_c) = {TamperModel::Kind::PresenceProbe, 1.0};
        const RoundSampler sampler(cfg);
        const CounterRng rng(mix64(seed ^ mix64(study++)));

        ProbeStudy ps;
        ps.probed_arm = probed;
        ps.bob_bit = b;
        ps.charlie_bit = c;
        ps.probed_action = probed == Arm::B ? encode(Party::Bob, b) : encode(Party::Charlie, c);
        ps.rounds = probe_rounds;
        for (std::uint64_t i = 0; i < probe_rounds; ++i) {
          RoundStream stream(rng, i);
          const RoundOutcome o = sampler.sample(b, c, stream);
          if (!o.probe_fired(probed)) continue;
          ++ps.probe_fired;
          if (o.terminal == Terminal::D1 || o.terminal == Terminal::D2) ++ps.fired_and_click;
        }
        report.probes.push_back(ps);
      }
    }
  }
  return report;
}

// Sweep ---------------------------------------------------------------------

std::vector<SweepRow> sweep_cycles(const std::vector<int>& cycle_counts) {
  std::vector<SweepRow> rows;
  rows.reserve(cycle_counts.size());
  for (int k : cycle_counts) {
    if (k < 1) throw ContractViolation("sweep cycle counts must be >= 1");
    const IdealLimit lim = ideal_limit_check(k);
    const auto agree = round_distribution(0, 0, k, k);
    const auto agree_other = round_distribution(1, 1, k, k);

    SweepRow row;
    row.cycles = k;
    row.survival_blocked = lim.survival_blocked;
    row.survival_unblocked = lim.survival_unblocked;
    row.survival_mean = 0.5 * (lim.survival_blocked + lim.survival_unblocked);
    row.fidelity_to_v = lim.fidelity_to_v;
    row.fidelity_to_h = lim.fidelity_to_h;
    row.agree_p_d1 = agree[Terminal::D1];
    row.agree_p_d2 = agree[Terminal::D2];
    row.agree_ratio = row.agree_p_d2 > 0.0 ? row.agree_p_d1 / row.agree_p_d2 : 0.0;
    row.kept_fraction = 0.25 * (agree[Terminal::D1] + agree_other[Terminal::D1]);
    row.differ_pass_p_d2 = round_distribution(0, 1, k, k)[Terminal::D2];
    row.differ_block_p_d2 = round_distribution(1, 0, k, k)[Terminal::D2];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tcqkd
