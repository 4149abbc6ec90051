// The three-party protocol: Alice's Michelson interferometer with one CQZE
// box per arm, Bob on arm B and Charlie on arm C.
//
// Encoding: Bob passes for 0 and blocks for 1; Charlie uses the complement.
// Differing bits therefore mean identical physical actions on both arms, the
// arm returns are equal and D1 stays dark. Alice keeps a round iff D1 clicks.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcqkd/amplitude.hpp"
#include "tcqkd/cqze.hpp"
#include "tcqkd/rng.hpp"

namespace tcqkd {

enum class Party { Bob, Charlie };
enum class Action { Pass, Block };

struct BitEncoding {
  Party party;
  int bit;
  Action action;

  static BitEncoding of(Party party, int bit);
};

Action encode(Party party, int bit);

/// Terminal detector events of one round.
enum class Terminal : std::size_t { D1 = 0, D2, D3B, D3C, D4B, D4C };

inline constexpr std::size_t kTerminalCount = 6;
inline constexpr std::array<Terminal, kTerminalCount> kTerminals{
    Terminal::D1, Terminal::D2, Terminal::D3B, Terminal::D3C, Terminal::D4B, Terminal::D4C};

DetectorId detector_of(Terminal t);
std::string_view to_string(Terminal t);
std::optional<Terminal> terminal_from_string(std::string_view s);

struct OutcomeDistribution {
  std::array<double, kTerminalCount> p{};

  double operator[](Terminal t) const { return p[static_cast<std::size_t>(t)]; }
  double& operator[](Terminal t) { return p[static_cast<std::size_t>(t)]; }
  double total() const;
};

struct TamperModel {
  enum class Kind { None, BlockAlways, PresenceProbe, PolFlip };
  Kind kind = Kind::None;
  double probability = 1.0;  // chance the model is active in a given round

  bool active() const { return kind != Kind::None && probability > 0.0; }

  /// "none", "block_always", "presence_probe", "pol_flip", optionally with
  /// ":<probability>". Throws std::invalid_argument on malformed input.
  static TamperModel parse(std::string_view text);
  std::string to_string() const;
};

struct ProtocolConfig {
  int outer_cycles = 2;  // M
  int inner_cycles = 2;  // N
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  TamperModel tamper_b;
  TamperModel tamper_c;
  bool record_polarization = false;
  unsigned workers = 1;  // run_session threads; output does not depend on it

  void validate() const;
  const TamperModel& tamper(Arm a) const { return a == Arm::B ? tamper_b : tamper_c; }
};

struct RoundOutcome {
  Terminal terminal = Terminal::D1;
  std::optional<Polarization> polarization;  // D1/D2 only, when recorded
  bool probe_fired_b = false;
  bool probe_fired_c = false;

  bool probe_fired(Arm a) const { return a == Arm::B ? probe_fired_b : probe_fired_c; }
};

struct RoundRecord {
  std::uint64_t round = 0;
  int bob_bit = 0;
  int charlie_bit = 0;
  RoundOutcome outcome;
  bool kept = false;
};

struct SessionRecord {
  std::vector<RoundRecord> rounds;
  std::array<std::uint64_t, kTerminalCount> counts{};
  std::uint64_t sifted_length = 0;
  std::uint64_t mismatches = 0;

  double kept_fraction() const;
  double qber() const;
};

struct SiftedKeys {
  std::string bob_key;
  std::string charlie_key;
  std::vector<std::uint64_t> kept_round_indices;
};

/// Full amplitude evolution of one round for fixed station actions.
PhotonState evolve_round(Action bob, Action charlie, int outer_cycles, int inner_cycles,
                         const ChannelHook& hook = {});

/// Terminal probabilities read off a released state.
OutcomeDistribution distribution_of(const PhotonState& released);

OutcomeDistribution round_distribution(int bob_bit, int charlie_bit, int outer_cycles,
                                       int inner_cycles);

/// Samples rounds for one configuration. Exact released states for the four
/// station-action pairs are computed once; only rounds with an active
/// stochastic tamper model are re-evolved.
class RoundSampler {
 public:
  explicit RoundSampler(const ProtocolConfig& config);

  RoundOutcome sample(int bob_bit, int charlie_bit, RoundStream& stream) const;

 private:
  const PhotonState& cached(Action bob, Action charlie) const;

  ProtocolConfig config_;
  std::array<PhotonState, 4> released_;
};

RoundOutcome run_round(int bob_bit, int charlie_bit, const ProtocolConfig& config,
                       RoundStream& stream);

struct SessionResult {
  SessionRecord record;
  SiftedKeys keys;
};

SessionResult run_session(const ProtocolConfig& config);

SiftedKeys sift(const std::vector<RoundRecord>& records);

// Counterfactuality audit -----------------------------------------------------

struct AuditCheck {
  int bob_bit = 0;
  int charlie_bit = 0;
  Arm arm = Arm::B;
  Action action = Action::Pass;
  DetectorId detector = DetectorId::D3B;  // the detector that must stay dark
  double probability = 0.0;
  bool passed = false;
};

struct AccountingCheck {
  int bob_bit = 0;
  int charlie_bit = 0;
  double channel_residual = 0.0;  // probability left on channel modes at release
  double survival = 0.0;          // P(D1) + P(D2)
  double guard_total = 0.0;       // all D3/D4 ledger entries
  double unaccounted = 0.0;       // |1 - survival - guard_total|
  bool passed = false;
};

/// Non-assertive: a presence probe in one channel during otherwise normal rounds.
struct ProbeStudy {
  Arm probed_arm = Arm::B;
  int bob_bit = 0;
  int charlie_bit = 0;
  Action probed_action = Action::Pass;
  std::uint64_t rounds = 0;
  std::uint64_t probe_fired = 0;
  std::uint64_t fired_and_click = 0;  // probe fired and D1 or D2 clicked

  double joint_frequency() const {
    return rounds ? static_cast<double>(fired_and_click) / static_cast<double>(rounds) : 0.0;
  }
  double fired_frequency() const {
    return rounds ? static_cast<double>(probe_fired) / static_cast<double>(rounds) : 0.0;
  }
};

struct AuditReport {
  int outer_cycles = 0;
  int inner_cycles = 0;
  std::vector<AuditCheck> checks;
  std::vector<AccountingCheck> accounting;
  std::vector<ProbeStudy> probes;

  bool all_passed() const;
};

AuditReport audit_counterfactuality(int outer_cycles, int inner_cycles,
                                    std::uint64_t probe_rounds = 20000,
                                    std::uint64_t seed = 1);

// Cycle sweep -----------------------------------------------------------------

struct SweepRow {
  int cycles = 0;  // M = N
  double survival_blocked = 0.0;
  double survival_unblocked = 0.0;
  double survival_mean = 0.0;
  double fidelity_to_v = 0.0;
  double fidelity_to_h = 0.0;
  double agree_p_d1 = 0.0;  // bits (0,0)
  double agree_p_d2 = 0.0;
  double agree_ratio = 0.0;  // P(D1)/P(D2), 0 when P(D2) = 0
  double kept_fraction = 0.0;
  double differ_pass_p_d2 = 0.0;   // bits (0,1)
  double differ_block_p_d2 = 0.0;  // bits (1,0)
};

std::vector<SweepRow> sweep_cycles(const std::vector<int>& cycle_counts);

}  // namespace tcqkd
