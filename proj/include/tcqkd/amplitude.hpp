// Single-photon amplitude bookkeeping over labeled optical modes.
//
// A PhotonState holds one excitation spread over (mode, polarization) pairs
// together with a ledger of probability already absorbed by detectors. The
// sum of |amplitude|^2 and ledger entries is always 1.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tcqkd {

using ComplexAmp = std::complex<double>;

/// Row-major 2x2 complex matrix.
using Matrix2 = std::array<std::array<ComplexAmp, 2>, 2>;

inline constexpr double kUnitaryTolerance = 1e-12;
inline constexpr double kConservationTolerance = 1e-12;
inline constexpr double kZeroProbabilityTolerance = 1e-9;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Polarization : std::size_t { H = 0, V = 1 };

enum class Arm : std::size_t { B = 0, C = 1 };

inline constexpr std::array<Arm, 2> kArms{Arm::B, Arm::C};

enum class ModeLabel : std::size_t {
  SourcePort = 0,
  ArmOuterB,
  ArmOuterC,
  ArmInnerB,
  ArmInnerC,
  ChannelB,
  ChannelC,
  ExitPort1,
  ExitPort2,
};

inline constexpr std::size_t kModeCount = 9;

enum class DetectorId : std::size_t {
  D1 = 0,
  D2,
  D3B,
  D3C,
  D4B,
  D4C,
  TamperProbeB,
  TamperProbeC,
};

inline constexpr std::size_t kDetectorCount = 8;

constexpr ModeLabel arm_outer(Arm a) { return a == Arm::B ? ModeLabel::ArmOuterB : ModeLabel::ArmOuterC; }
constexpr ModeLabel arm_inner(Arm a) { return a == Arm::B ? ModeLabel::ArmInnerB : ModeLabel::ArmInnerC; }
constexpr ModeLabel channel(Arm a) { return a == Arm::B ? ModeLabel::ChannelB : ModeLabel::ChannelC; }
constexpr DetectorId d3(Arm a) { return a == Arm::B ? DetectorId::D3B : DetectorId::D3C; }
constexpr DetectorId d4(Arm a) { return a == Arm::B ? DetectorId::D4B : DetectorId::D4C; }
constexpr DetectorId tamper_probe(Arm a) { return a == Arm::B ? DetectorId::TamperProbeB : DetectorId::TamperProbeC; }
constexpr Arm other(Arm a) { return a == Arm::B ? Arm::C : Arm::B; }

std::string_view to_string(Polarization p);
std::string_view to_string(Arm a);
std::string_view to_string(ModeLabel m);
std::string_view to_string(DetectorId d);

/// Largest entry of |U^dagger U - I|.
double unitarity_defect(const Matrix2& u);

class PhotonState {
 public:
  /// Unit amplitude at (mode, pol), empty ledger.
  static PhotonState single(ModeLabel mode, Polarization pol);

  /// All-zero amplitudes and ledger. Only meaningful as a building block
  /// for superpositions; total probability is 0.
  static PhotonState vacuum() { return PhotonState{}; }

  ComplexAmp amplitude(ModeLabel mode, Polarization pol) const {
    return amps_[index(mode)][index(pol)];
  }
  void set_amplitude(ModeLabel mode, Polarization pol, ComplexAmp value) {
    amps_[index(mode)][index(pol)] = value;
  }

  double ledger(DetectorId d) const { return ledger_[index(d)]; }
  void add_to_ledger(DetectorId d, double p);

  /// Probability currently in flight at the mode (both polarizations).
  double mode_probability(ModeLabel mode) const;
  double amplitude_norm() const;
  double ledger_total() const;
  double total_probability() const { return amplitude_norm() + ledger_total(); }

  bool is_finite() const;

  /// Scales amplitudes by `amp_factor` and ledger by |amp_factor|^2.
  PhotonState scaled(ComplexAmp amp_factor) const;

  /// Entry-wise sum; used to build superpositions over disjoint supports.
  friend PhotonState operator+(const PhotonState& a, const PhotonState& b);

 private:
  template <typename E>
  static constexpr std::size_t index(E e) { return static_cast<std::size_t>(e); }

  std::array<std::array<ComplexAmp, 2>, kModeCount> amps_{};
  std::array<double, kDetectorCount> ledger_{};
};

/// Equivalent to PhotonState::single.
PhotonState new_state(ModeLabel mode, Polarization pol);

/// Mixes (modeA, p) with (modeB, p) for each polarization p. `matrix` acts on
/// the column vector (amp at modeA, amp at modeB).
PhotonState apply_two_mode_unitary(PhotonState state, ModeLabel mode_a, ModeLabel mode_b,
                                   const Matrix2& matrix);

/// Mixes (mode, H) with (mode, V).
PhotonState apply_pol_unitary(PhotonState state, ModeLabel mode, const Matrix2& matrix);

/// Moves |amp|^2 of the matching entries into the ledger and zeroes them.
/// With no filter both polarizations are absorbed.
PhotonState absorb(PhotonState state, ModeLabel mode, std::optional<Polarization> filter,
                   DetectorId detector);

double total_probability(const PhotonState& state);

struct PresenceResult {
  PhotonState state;
  bool present;
};

/// Non-destructive "is the photon at `mode`?" probe driven by an external
/// uniform draw in [0,1). The present branch is taken iff draw < P(mode).
PresenceResult decohere_presence(const PhotonState& state, ModeLabel mode, double rng_draw);

}  // namespace tcqkd
