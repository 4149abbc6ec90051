// Optical elements of the tripartite setup, expressed on PhotonState.
//
// Phase conventions:
//   beamsplitter  transmission 1/sqrt2, reflection i/sqrt2
//   pbs, mirror   +1
// Only relative phases between interfering paths are observable, and every
// path through the Michelson sees the same mirror and PBS phases.

#pragma once

#include <cstdint>
#include <vector>

#include "tcqkd/amplitude.hpp"

namespace tcqkd {

/// Polarization rotation angle in radians.
struct RotationAngle {
  double radians = 0.0;

  /// The per-cycle angle pi/(2*cycles) that turns H into V after `cycles` steps.
  static RotationAngle quarter_turn_over(int cycles);
};

Matrix2 beamsplitter_matrix();
Matrix2 rotation_matrix(RotationAngle theta);

PhotonState beamsplitter(PhotonState state, ModeLabel port1, ModeLabel port2);

/// R(theta): H -> cos*H + sin*V, V -> -sin*H + cos*V.
PhotonState polarization_rotator(PhotonState state, ModeLabel mode, RotationAngle theta);

/// Routes H at `in_mode` to `h_out` and V at `in_mode` to `v_out`. Implemented
/// as a per-polarization swap so it stays a permutation of the modes involved;
/// when a destination equals `in_mode` that polarization is left in place.
PhotonState pbs(PhotonState state, ModeLabel in_mode, ModeLabel h_out, ModeLabel v_out);

/// Flips H <-> V when on.
PhotonState pockels_cell(PhotonState state, ModeLabel mode, bool on);

PhotonState mirror(PhotonState state, ModeLabel mode);

/// Moves all amplitude from `from` to the empty mode `to`. Throws if `to` is
/// occupied.
PhotonState relabel(PhotonState state, ModeLabel from, ModeLabel to);

/// ExitPort1 -> D1, ExitPort2 -> D2.
DetectorId circulator_route(ModeLabel outcome_port);

/// Source photon through Alice's beamsplitter: transmitted part onto
/// ArmOuter(B), reflected part onto ArmOuter(C).
PhotonState michelson_split(PhotonState state);

/// Second beamsplitter pass for light returning on both arms; B-side output
/// leaves through ExitPort1, C-side output through ExitPort2.
PhotonState michelson_recombine(PhotonState state);

/// Which switchable elements fire in one inner-cycle time slot of the CQZE box.
struct SwitchStep {
  int outer_cycle = 0;      // 0-based
  int inner_cycle = 0;      // 0-based
  bool sm1_open = false;    // photon enters (first slot) or leaves (last slot) the outer loop
  bool spr1_on = false;     // outer rotation, first slot of each outer cycle
  bool sm2_entry = false;   // outer V admitted to the inner loop
  bool spr2_on = false;     // inner rotation, once per inner cycle
  bool sm2_exit = false;    // inner loop released back to the outer loop
  bool pc_on = false;       // Pockels cell (blocking)
};

struct SwitchSchedule {
  int outer_cycles = 0;
  int inner_cycles = 0;
  std::vector<SwitchStep> steps;
};

SwitchSchedule make_switch_schedule(int outer_cycles, int inner_cycles, bool blocked);

}  // namespace tcqkd
