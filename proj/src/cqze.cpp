#include "tcqkd/cqze.hpp"

namespace tcqkd {

namespace {

void validate(const CqzeConfig& c) {
  if (c.outer_cycles < 1 || c.inner_cycles < 1) {
    throw ContractViolation("CQZE cycle counts must be >= 1");
  }
}

}  // namespace

PhotonState cqze_evolve(PhotonState state, const CqzeConfig& config, const ChannelHook& hook) {
  validate(config);
  const auto outer = arm_outer(config.arm);
  const auto inner = arm_inner(config.arm);
  const auto chan = channel(config.arm);
  const auto outer_theta = RotationAngle::quarter_turn_over(config.outer_cycles);
  const auto inner_theta = RotationAngle::quarter_turn_over(config.inner_cycles);

  const SwitchSchedule sched =
      make_switch_schedule(config.outer_cycles, config.inner_cycles, config.blocked);

  for (const SwitchStep& step : sched.steps) {
    if (step.spr1_on) state = polarization_rotator(std::move(state), outer, outer_theta);
    if (step.sm2_entry) state = pbs(std::move(state), outer, outer, inner);  // PBS1

    if (step.spr2_on) state = polarization_rotator(std::move(state), inner, inner_theta);
    state = pbs(std::move(state), inner, chan, inner);  // PBS2: H toward the party

    if (hook) hook(state, config.arm);
    state = pockels_cell(std::move(state), chan, step.pc_on);
    // The party's PBS diverts flipped light into D4.
    state = absorb(std::move(state), chan, Polarization::V, d4(config.arm));
    state = mirror(std::move(state), chan);
    state = pbs(std::move(state), chan, inner, chan);  // returning H re-enters

    if (step.sm2_exit) {
      state = absorb(std::move(state), inner, Polarization::H, d3(config.arm));
      state = pbs(std::move(state), inner, inner, outer);
    }
  }
  return state;
}

CqzeTransfer cqze_transfer(const CqzeConfig& config) {
  const PhotonState out =
      cqze_evolve(PhotonState::single(arm_outer(config.arm), Polarization::H), config);
  const auto outer = arm_outer(config.arm);
  return CqzeTransfer{out.amplitude(outer, Polarization::H), out.amplitude(outer, Polarization::V),
                      out.ledger(d3(config.arm)), out.ledger(d4(config.arm))};
}

IdealLimit ideal_limit_check(int cycles) {
  if (cycles < 1) throw ContractViolation("ideal_limit_check: cycles must be >= 1");
  const auto blocked = cqze_transfer({cycles, cycles, true, Arm::B});
  const auto open = cqze_transfer({cycles, cycles, false, Arm::B});
  IdealLimit r;
  r.cycles = cycles;
  r.survival_blocked = blocked.survival();
  r.survival_unblocked = open.survival();
  r.fidelity_to_v = r.survival_blocked > 0.0 ? std::norm(blocked.a_v) / r.survival_blocked : 0.0;
  r.fidelity_to_h = r.survival_unblocked > 0.0 ? std::norm(open.a_h) / r.survival_unblocked : 0.0;
  return r;
}

}  // namespace tcqkd
