#include "tcqkd/amplitude.hpp"

#include <algorithm>
#include <cmath>

namespace tcqkd {

std::string_view to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

std::string_view to_string(Arm a) { return a == Arm::B ? "B" : "C"; }

std::string_view to_string(ModeLabel m) {
  switch (m) {
    case ModeLabel::SourcePort: return "SourcePort";
    case ModeLabel::ArmOuterB: return "ArmOuter(B)";
    case ModeLabel::ArmOuterC: return "ArmOuter(C)";
    case ModeLabel::ArmInnerB: return "ArmInner(B)";
    case ModeLabel::ArmInnerC: return "ArmInner(C)";
    case ModeLabel::ChannelB: return "Channel(B)";
    case ModeLabel::ChannelC: return "Channel(C)";
    case ModeLabel::ExitPort1: return "ExitPort1";
    case ModeLabel::ExitPort2: return "ExitPort2";
  }
  return "?";
}

std::string_view to_string(DetectorId d) {
  switch (d) {
    case DetectorId::D1: return "D1";
    case DetectorId::D2: return "D2";
    case DetectorId::D3B: return "D3(B)";
    case DetectorId::D3C: return "D3(C)";
    case DetectorId::D4B: return "D4(B)";
    case DetectorId::D4C: return "D4(C)";
    case DetectorId::TamperProbeB: return "TamperProbe(B)";
    case DetectorId::TamperProbeC: return "TamperProbe(C)";
  }
  return "?";
}

double unitarity_defect(const Matrix2& u) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexAmp s{};
      for (std::size_t k = 0; k < 2; ++k) s += std::conj(u[k][i]) * u[k][j];
      if (i == j) s -= 1.0;
      // NaN entries must fail the check rather than slip through max().
      const double d = std::abs(s);
      worst = std::isnan(d) ? INFINITY : std::max(worst, d);
    }
  }
  return worst;
}

namespace {

void require_unitary(const Matrix2& u, const char* op) {
  if (!(unitarity_defect(u) <= kUnitaryTolerance)) {
    throw ContractViolation(std::string(op) + ": matrix is not unitary within 1e-12");
  }
}

}  // namespace

PhotonState PhotonState::single(ModeLabel mode, Polarization pol) {
  PhotonState s;
  s.set_amplitude(mode, pol, 1.0);
  return s;
}

void PhotonState::add_to_ledger(DetectorId d, double p) {
  if (!(p >= 0.0)) throw ContractViolation("ledger increments must be non-negative");
  ledger_[index(d)] += p;
}

double PhotonState::mode_probability(ModeLabel mode) const {
  const auto& row = amps_[index(mode)];
  return std::norm(row[0]) + std::norm(row[1]);
}

double PhotonState::amplitude_norm() const {
  double sum = 0.0;
  for (const auto& row : amps_) sum += std::norm(row[0]) + std::norm(row[1]);
  return sum;
}

double PhotonState::ledger_total() const {
  double sum = 0.0;
  for (double p : ledger_) sum += p;
  return sum;
}

bool PhotonState::is_finite() const {
  for (const auto& row : amps_) {
    for (const auto& a : row) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    }
  }
  return std::all_of(ledger_.begin(), ledger_.end(), [](double p) { return std::isfinite(p); });
}

PhotonState PhotonState::scaled(ComplexAmp amp_factor) const {
  PhotonState out = *this;
  for (auto& row : out.amps_) {
    row[0] *= amp_factor;
    row[1] *= amp_factor;
  }
  const double w = std::norm(amp_factor);
  for (double& p : out.ledger_) p *= w;
  return out;
}

PhotonState operator+(const PhotonState& a, const PhotonState& b) {
  PhotonState out = a;
  for (std::size_t m = 0; m < kModeCount; ++m) {
    out.amps_[m][0] += b.amps_[m][0];
    out.amps_[m][1] += b.amps_[m][1];
  }
  for (std::size_t d = 0; d < kDetectorCount; ++d) out.ledger_[d] += b.ledger_[d];
  return out;
}

PhotonState new_state(ModeLabel mode, Polarization pol) { return PhotonState::single(mode, pol); }

PhotonState apply_two_mode_unitary(PhotonState state, ModeLabel mode_a, ModeLabel mode_b,
                                   const Matrix2& matrix) {
  require_unitary(matrix, "apply_two_mode_unitary");
  if (mode_a == mode_b) throw ContractViolation("apply_two_mode_unitary: modes must differ");
  for (Polarization p : {Polarization::H, Polarization::V}) {
    const ComplexAmp a = state.amplitude(mode_a, p);
    const ComplexAmp b = state.amplitude(mode_b, p);
    state.set_amplitude(mode_a, p, matrix[0][0] * a + matrix[0][1] * b);
    state.set_amplitude(mode_b, p, matrix[1][0] * a + matrix[1][1] * b);
  }
  return state;
}

PhotonState apply_pol_unitary(PhotonState state, ModeLabel mode, const Matrix2& matrix) {
  require_unitary(matrix, "apply_pol_unitary");
  const ComplexAmp h = state.amplitude(mode, Polarization::H);
  const ComplexAmp v = state.amplitude(mode, Polarization::V);
  state.set_amplitude(mode, Polarization::H, matrix[0][0] * h + matrix[0][1] * v);
  state.set_amplitude(mode, Polarization::V, matrix[1][0] * h + matrix[1][1] * v);
  return state;
}

PhotonState absorb(PhotonState state, ModeLabel mode, std::optional<Polarization> filter,
                   DetectorId detector) {
  for (Polarization p : {Polarization::H, Polarization::V}) {
    if (filter && *filter != p) continue;
    const double w = std::norm(state.amplitude(mode, p));
    if (w == 0.0) continue;
    state.add_to_ledger(detector, w);
    state.set_amplitude(mode, p, 0.0);
  }
  return state;
}

double total_probability(const PhotonState& state) { return state.total_probability(); }

PresenceResult decohere_presence(const PhotonState& state, ModeLabel mode, double rng_draw) {
  const double p_here = state.mode_probability(mode);
  if (p_here == 0.0) return {state, false};

  if (rng_draw < p_here) {
    // Conditioned on presence the photon was never absorbed elsewhere.
    const double scale = 1.0 / std::sqrt(p_here);
    PhotonState out;
    for (Polarization p : {Polarization::H, Polarization::V}) {
      out.set_amplitude(mode, p, state.amplitude(mode, p) * scale);
    }
    return {out, true};
  }

  PhotonState out = state;
  out.set_amplitude(mode, Polarization::H, 0.0);
  out.set_amplitude(mode, Polarization::V, 0.0);
  const double rest = state.total_probability() - p_here;
  return {out.scaled(1.0 / std::sqrt(rest)), false};
}

}  // namespace tcqkd
