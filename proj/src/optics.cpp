#include "tcqkd/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tcqkd {

RotationAngle RotationAngle::quarter_turn_over(int cycles) {
  if (cycles < 1) throw ContractViolation("cycle count must be >= 1");
  return RotationAngle{std::numbers::pi / (2.0 * cycles)};
}

Matrix2 beamsplitter_matrix() {
  const double r = 1.0 / std::numbers::sqrt2;
  const ComplexAmp t{r, 0.0};
  const ComplexAmp i{0.0, r};
  return {{{t, i}, {i, t}}};
}

Matrix2 rotation_matrix(RotationAngle theta) {
  if (!std::isfinite(theta.radians)) throw ContractViolation("rotation angle must be finite");
  const double c = std::cos(theta.radians);
  const double s = std::sin(theta.radians);
  return {{{c, -s}, {s, c}}};
}

PhotonState beamsplitter(PhotonState state, ModeLabel port1, ModeLabel port2) {
  return apply_two_mode_unitary(std::move(state), port1, port2, beamsplitter_matrix());
}

PhotonState polarization_rotator(PhotonState state, ModeLabel mode, RotationAngle theta) {
  return apply_pol_unitary(std::move(state), mode, rotation_matrix(theta));
}

namespace {

void swap_entry(PhotonState& s, ModeLabel a, ModeLabel b, Polarization p) {
  const ComplexAmp tmp = s.amplitude(a, p);
  s.set_amplitude(a, p, s.amplitude(b, p));
  s.set_amplitude(b, p, tmp);
}

}  // namespace

PhotonState pbs(PhotonState state, ModeLabel in_mode, ModeLabel h_out, ModeLabel v_out) {
  if (h_out == v_out) throw ContractViolation("pbs: H and V outputs must differ");
  if (h_out != in_mode) swap_entry(state, in_mode, h_out, Polarization::H);
  if (v_out != in_mode) swap_entry(state, in_mode, v_out, Polarization::V);
  return state;
}

PhotonState pockels_cell(PhotonState state, ModeLabel mode, bool on) {
  if (!on) return state;
  const ComplexAmp h = state.amplitude(mode, Polarization::H);
  state.set_amplitude(mode, Polarization::H, state.amplitude(mode, Polarization::V));
  state.set_amplitude(mode, Polarization::V, h);
  return state;
}

PhotonState mirror(PhotonState state, ModeLabel /*mode*/) { return state; }

PhotonState relabel(PhotonState state, ModeLabel from, ModeLabel to) {
  if (from == to) return state;
  if (state.mode_probability(to) != 0.0) {
    throw ContractViolation(std::string("relabel: destination ") + std::string(to_string(to)) +
                            " is occupied");
  }
  for (Polarization p : {Polarization::H, Polarization::V}) swap_entry(state, from, to, p);
  return state;
}

DetectorId circulator_route(ModeLabel outcome_port) {
  switch (outcome_port) {
    case ModeLabel::ExitPort1: return DetectorId::D1;
    case ModeLabel::ExitPort2: return DetectorId::D2;
    default:
      throw ContractViolation(std::string("circulator_route: ") +
                              std::string(to_string(outcome_port)) + " is not an exit port");
  }
}

PhotonState michelson_split(PhotonState state) {
  state = beamsplitter(std::move(state), ModeLabel::SourcePort, ModeLabel::ArmOuterC);
  return relabel(std::move(state), ModeLabel::SourcePort, ModeLabel::ArmOuterB);
}

PhotonState michelson_recombine(PhotonState state) {
  state = mirror(std::move(state), ModeLabel::ArmOuterB);
  state = mirror(std::move(state), ModeLabel::ArmOuterC);
  state = beamsplitter(std::move(state), ModeLabel::ArmOuterB, ModeLabel::ArmOuterC);
  state = relabel(std::move(state), ModeLabel::ArmOuterB, ModeLabel::ExitPort1);
  return relabel(std::move(state), ModeLabel::ArmOuterC, ModeLabel::ExitPort2);
}

SwitchSchedule make_switch_schedule(int outer_cycles, int inner_cycles, bool blocked) {
  if (outer_cycles < 1 || inner_cycles < 1) {
    throw ContractViolation("switch schedule needs at least one outer and one inner cycle");
  }
  SwitchSchedule sched{outer_cycles, inner_cycles, {}};
  sched.steps.reserve(static_cast<std::size_t>(outer_cycles) * inner_cycles);
  for (int o = 0; o < outer_cycles; ++o) {
    for (int i = 0; i < inner_cycles; ++i) {
      SwitchStep s;
      s.outer_cycle = o;
      s.inner_cycle = i;
      const bool first_slot = (o == 0 && i == 0);
      const bool last_slot = (o == outer_cycles - 1 && i == inner_cycles - 1);
      s.sm1_open = first_slot || last_slot;
      s.spr1_on = (i == 0);
      s.sm2_entry = (i == 0);
      s.spr2_on = true;
      s.sm2_exit = (i == inner_cycles - 1);
      s.pc_on = blocked;
      sched.steps.push_back(s);
    }
  }
  return sched;
}

}  // namespace tcqkd
