// Chained quantum Zeno effect box for one arm, generalized to M outer and
// N inner cycles.
//
// Per outer cycle the outer loop polarization is rotated by pi/(2M) and its V
// part is admitted to the inner loop. Per inner cycle the inner polarization is
// rotated by pi/(2N) and its H part is sent into the channel, where the
// party's station either absorbs it (blocked, D4) or reflects it back
// (unblocked). When the inner loop is released, H is absorbed at D3 and V
// rejoins the outer loop.

#pragma once

#include <functional>

#include "tcqkd/amplitude.hpp"
#include "tcqkd/optics.hpp"

namespace tcqkd {

struct CqzeConfig {
  int outer_cycles = 2;  // M
  int inner_cycles = 2;  // N
  bool blocked = false;
  Arm arm = Arm::B;
};

struct CqzeTransfer {
  ComplexAmp a_h;
  ComplexAmp a_v;
  double p_d3 = 0.0;
  double p_d4 = 0.0;

  double survival() const { return std::norm(a_h) + std::norm(a_v); }
  double total() const { return survival() + p_d3 + p_d4; }
};

/// Invoked each time light has just entered the arm's channel, before the
/// party's Pockels cell. Used for tamper models; must keep the state valid.
using ChannelHook = std::function<void(PhotonState&, Arm)>;

/// Unit H into the box, exact output amplitudes and losses.
CqzeTransfer cqze_transfer(const CqzeConfig& config);

/// Runs the box in situ on whatever amplitude sits on ArmOuter(config.arm).
/// Other arms' entries are untouched.
PhotonState cqze_evolve(PhotonState state, const CqzeConfig& config,
                        const ChannelHook& hook = {});

struct IdealLimit {
  int cycles = 0;
  double survival_blocked = 0.0;
  double survival_unblocked = 0.0;
  double fidelity_to_v = 0.0;  // normalized blocked survivor vs |V>
  double fidelity_to_h = 0.0;  // normalized unblocked survivor vs |H>
};

/// Runs the box at M = N = cycles in both block settings.
IdealLimit ideal_limit_check(int cycles);

}  // namespace tcqkd
