#include <doctest.h>

#include <cmath>

#include "../oracle/unrolled_oracle.hpp"
#include "tcqkd/protocol.hpp"

using namespace tcqkd;

namespace {

void check_against_oracle(const OutcomeDistribution& d, const oracle::Distribution& o,
                          double tol = 1e-12) {
  CHECK(std::abs(d[Terminal::D1] - o.d1) <= tol);
  CHECK(std::abs(d[Terminal::D2] - o.d2) <= tol);
  CHECK(std::abs(d[Terminal::D3B] - o.d3b) <= tol);
  CHECK(std::abs(d[Terminal::D3C] - o.d3c) <= tol);
  CHECK(std::abs(d[Terminal::D4B] - o.d4b) <= tol);
  CHECK(std::abs(d[Terminal::D4C] - o.d4c) <= tol);
}

}  // namespace

TEST_CASE("bit encoding") {
  CHECK(encode(Party::Bob, 0) == Action::Pass);
  CHECK(encode(Party::Bob, 1) == Action::Block);
  CHECK(encode(Party::Charlie, 1) == Action::Pass);
  CHECK(encode(Party::Charlie, 0) == Action::Block);
  CHECK(BitEncoding::of(Party::Charlie, 0).action == Action::Block);
  CHECK_THROWS_AS(encode(Party::Bob, 2), ContractViolation);
}

TEST_CASE("round_distribution at M = N = 2") {
  SUBCASE("bits differ, both pass") {
    const auto d = round_distribution(0, 1, 2, 2);
    CHECK(std::abs(d[Terminal::D2] - 0.25) <= 1e-12);
    CHECK(d[Terminal::D1] <= 1e-12);
    CHECK(std::abs(d[Terminal::D3B] - 0.375) <= 1e-12);
    CHECK(std::abs(d[Terminal::D3C] - 0.375) <= 1e-12);
  }
  SUBCASE("bits differ, both block") {
    const auto d = round_distribution(1, 0, 2, 2);
    CHECK(std::abs(d[Terminal::D2] - 13.0 / 64.0) <= 1e-12);
    CHECK(d[Terminal::D1] <= 1e-12);
    CHECK(std::abs(d[Terminal::D4B] - 51.0 / 128.0) <= 1e-12);
    CHECK(std::abs(d[Terminal::D4C] - 51.0 / 128.0) <= 1e-12);
  }
  SUBCASE("bits agree") {
    const auto d = round_distribution(0, 0, 2, 2);
    CHECK(std::abs(d[Terminal::D1] - 13.0 / 256.0) <= 1e-12);
    CHECK(std::abs(d[Terminal::D2] - 45.0 / 256.0) <= 1e-12);
    CHECK(std::abs(d[Terminal::D3B] - 0.375) <= 1e-12);
    CHECK(std::abs(d[Terminal::D4C] - 51.0 / 128.0) <= 1e-12);
    CHECK(std::abs(d.total() - 1.0) <= 1e-12);
  }
  for (int b = 0; b <= 1; ++b) {
    for (int c = 0; c <= 1; ++c) check_against_oracle(round_distribution(b, c, 2, 2),
                                                      oracle::protocol_distribution(b, c, 2, 2));
  }
}

TEST_CASE("round_distribution invariants over M, N in [1, 32]") {
  for (int m = 1; m <= 32; m += (m < 6 ? 1 : 5)) {
    for (int n = 1; n <= 32; n += (n < 6 ? 1 : 5)) {
      CAPTURE(m);
      CAPTURE(n);
      std::array<OutcomeDistribution, 4> d;
      for (int b = 0; b <= 1; ++b) {
        for (int c = 0; c <= 1; ++c) {
          d[2 * b + c] = round_distribution(b, c, m, n);
          CHECK(std::abs(d[2 * b + c].total() - 1.0) <= 1e-12);
          for (double p : d[2 * b + c].p) CHECK(p >= 0.0);
          check_against_oracle(d[2 * b + c], oracle::protocol_distribution(b, c, m, n));
        }
      }
      CHECK(d[1][Terminal::D1] <= 1e-9);
      CHECK(d[2][Terminal::D1] <= 1e-9);
      // (0,0) <-> (1,1) under B <-> C.
      CHECK(std::abs(d[0][Terminal::D1] - d[3][Terminal::D1]) <= 1e-12);
      CHECK(std::abs(d[0][Terminal::D2] - d[3][Terminal::D2]) <= 1e-12);
      CHECK(std::abs(d[0][Terminal::D3B] - d[3][Terminal::D3C]) <= 1e-12);
      CHECK(std::abs(d[0][Terminal::D3C] - d[3][Terminal::D3B]) <= 1e-12);
      CHECK(std::abs(d[0][Terminal::D4B] - d[3][Terminal::D4C]) <= 1e-12);
      CHECK(std::abs(d[0][Terminal::D4C] - d[3][Terminal::D4B]) <= 1e-12);
    }
  }
}

TEST_CASE("evolve_round leaves nothing in flight except at the exit ports") {
  for (Action b : {Action::Pass, Action::Block}) {
    for (Action c : {Action::Pass, Action::Block}) {
      const auto s = evolve_round(b, c, 3, 4);
      for (auto mode : {ModeLabel::SourcePort, ModeLabel::ArmOuterB, ModeLabel::ArmOuterC,
                        ModeLabel::ArmInnerB, ModeLabel::ArmInnerC, ModeLabel::ChannelB,
                        ModeLabel::ChannelC}) {
        CHECK(s.mode_probability(mode) == 0.0);
      }
    }
  }
}

TEST_CASE("tamper model parsing") {
  CHECK(TamperModel::parse("none").kind == TamperModel::Kind::None);
  const auto t = TamperModel::parse("presence_probe:0.25");
  CHECK(t.kind == TamperModel::Kind::PresenceProbe);
  CHECK(t.probability == 0.25);
  CHECK(TamperModel::parse("pol_flip").probability == 1.0);
  CHECK(TamperModel::parse(t.to_string()).probability == 0.25);
  CHECK_THROWS_AS(TamperModel::parse("block_always:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(TamperModel::parse("sniff"), std::invalid_argument);
  CHECK_THROWS_AS(TamperModel::parse("pol_flip:x"), std::invalid_argument);
}

TEST_CASE("run_round") {
  ProtocolConfig cfg;
  const CounterRng rng(99);

  SUBCASE("differing bits never reach D1") {
    const RoundSampler sampler(cfg);
    for (std::uint64_t i = 0; i < 20000; ++i) {
      RoundStream s(rng, i);
      CHECK(sampler.sample(0, 1, s).terminal != Terminal::D1);
      RoundStream s2(rng, i);
      CHECK(sampler.sample(1, 0, s2).terminal != Terminal::D1);
    }
  }
  SUBCASE("same stream position, same outcome") {
    for (std::uint64_t i = 0; i < 100; ++i) {
      RoundStream a(rng, i), b(rng, i);
      CHECK(run_round(0, 0, cfg, a).terminal == run_round(0, 0, cfg, b).terminal);
    }
  }
  SUBCASE("single-cycle boxes always lose the photon") {
    cfg.outer_cycles = cfg.inner_cycles = 1;
    const RoundSampler sampler(cfg);
    for (std::uint64_t i = 0; i < 2000; ++i) {
      RoundStream s(rng, i);
      const auto t = sampler.sample(static_cast<int>(i % 2), static_cast<int>((i / 2) % 2), s).terminal;
      CHECK(t != Terminal::D1);
      CHECK(t != Terminal::D2);
    }
  }
  SUBCASE("polarization diagnostic reveals the blocked arm's V") {
    cfg.record_polarization = true;
    const RoundSampler sampler(cfg);
    int v_at_d1 = 0, d1 = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      RoundStream s(rng, i);
      const auto o = sampler.sample(0, 0, s);
      if (o.terminal == Terminal::D1) {
        ++d1;
        REQUIRE(o.polarization.has_value());
        v_at_d1 += *o.polarization == Polarization::V;
      }
    }
    // At D1 the V share is (3/16)^2 / (13/256) = 9/13.
    const double frac = double(v_at_d1) / d1;
    CHECK(std::abs(frac - 9.0 / 13.0) < 5 * std::sqrt(9.0 / 13.0 * 4.0 / 13.0 / d1));
  }
}

TEST_CASE("sift") {
  std::vector<RoundRecord> recs(4);
  const Terminal outcomes[] = {Terminal::D2, Terminal::D1, Terminal::D3B, Terminal::D1};
  const int bob[] = {0, 1, 0, 0}, charlie[] = {1, 1, 0, 0};
  for (std::size_t i = 0; i < 4; ++i) {
    recs[i].round = i;
    recs[i].bob_bit = bob[i];
    recs[i].charlie_bit = charlie[i];
    recs[i].outcome.terminal = outcomes[i];
  }
  const auto keys = sift(recs);
  CHECK(keys.bob_key == "10");
  CHECK(keys.charlie_key == "10");
  CHECK(keys.kept_round_indices == std::vector<std::uint64_t>{1, 3});

  for (auto& r : recs) r.outcome.terminal = Terminal::D2;
  CHECK(sift(recs).bob_key.empty());
  for (auto& r : recs) r.outcome.terminal = Terminal::D1;
  CHECK(sift(recs).bob_key == "0100");
  CHECK(sift(recs).charlie_key == "1100");
}

TEST_CASE("run_session") {
  ProtocolConfig cfg;
  cfg.rounds = 200000;
  cfg.seed = 42;

  SUBCASE("noiseless keys agree and the kept fraction is near 13/512") {
    const auto r = run_session(cfg);
    CHECK(r.keys.bob_key == r.keys.charlie_key);
    CHECK(r.record.mismatches == 0);
    CHECK(r.record.qber() == 0.0);
    const double p = 13.0 / 512.0;
    const double se = std::sqrt(p * (1 - p) / cfg.rounds);
    CHECK(std::abs(r.record.kept_fraction() - p) < 3 * se);
    for (const auto& rr : r.record.rounds) CHECK(rr.kept == (rr.outcome.terminal == Terminal::D1));
  }
  SUBCASE("worker count does not change the result") {
    cfg.rounds = 50000;
    const auto serial = run_session(cfg);
    cfg.workers = 4;
    const auto parallel = run_session(cfg);
    CHECK(serial.keys.bob_key == parallel.keys.bob_key);
    CHECK(serial.record.counts == parallel.record.counts);
    for (std::size_t i = 0; i < serial.record.rounds.size(); i += 997) {
      CHECK(serial.record.rounds[i].outcome.terminal == parallel.record.rounds[i].outcome.terminal);
    }
  }
  SUBCASE("round count boundaries") {
    cfg.rounds = 0;
    CHECK_THROWS_AS(run_session(cfg), ContractViolation);
    cfg.rounds = 1;
    CHECK(run_session(cfg).record.rounds.size() == 1);
  }
  SUBCASE("block_always on arm B pushes D4(B) to the blocked level") {
    cfg.rounds = 100000;
    cfg.tamper_b = TamperModel::parse("block_always");
    const auto r = run_session(cfg);
    // Bob's box always blocks: P(D4(B)) = 51/128 regardless of the bits.
    const double p = 51.0 / 128.0;
    const double freq = double(r.record.counts[static_cast<std::size_t>(Terminal::D4B)]) / cfg.rounds;
    CHECK(std::abs(freq - p) < 5 * std::sqrt(p * (1 - p) / cfg.rounds));
    CHECK(r.record.counts[static_cast<std::size_t>(Terminal::D3B)] == 0);
  }
  SUBCASE("pol_flip on a passing arm lights D4") {
    cfg.rounds = 20000;
    cfg.tamper_c = TamperModel::parse("pol_flip:0.5");
    const auto r = run_session(cfg);
    CHECK(r.record.counts[static_cast<std::size_t>(Terminal::D4C)] > 0);
  }
}

TEST_CASE("audit_counterfactuality") {
  const auto rep = audit_counterfactuality(2, 2, 40000, 5);
  CHECK(rep.all_passed());
  REQUIRE(rep.checks.size() == 8);
  for (const auto& c : rep.checks) {
    if (c.action == Action::Block) CHECK(c.detector == d3(c.arm));
    else CHECK(c.detector == d4(c.arm));
    CHECK(c.probability <= 1e-9);
  }
  for (const auto& a : rep.accounting) CHECK(a.channel_residual == 0.0);

  // Probe studies against exact branch enumeration.
  const auto open = oracle::probe_exact(2, 2, false);
  const auto closed = oracle::probe_exact(2, 2, true);
  REQUIRE(rep.probes.size() == 8);
  for (const auto& p : rep.probes) {
    const auto& exact = p.probed_action == Action::Pass ? open : closed;
    const double n = double(p.rounds);
    const auto within = [&](double freq, double q) {
      return std::abs(freq - q) <= 5 * std::sqrt(std::max(q * (1 - q), 1e-12) / n);
    };
    CHECK(within(p.fired_frequency(), exact.fired));
    CHECK(within(p.joint_frequency(), exact.fired_and_click));
  }
  CHECK(open.fired_and_click > 0.0);
  CHECK(closed.fired_and_click == 0.0);

  const auto degenerate = audit_counterfactuality(1, 1, 100, 1);
  CHECK(degenerate.all_passed());
}

TEST_CASE("sweep_cycles") {
  const auto rows = sweep_cycles({1, 2, 5, 10, 25});
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].survival_blocked <= 1e-12);
  CHECK(rows[0].agree_p_d1 + rows[0].agree_p_d2 <= 1e-12);

  const auto& k2 = rows[1];
  CHECK(std::abs(k2.survival_blocked - 13.0 / 64.0) <= 1e-12);
  CHECK(std::abs(k2.survival_unblocked - 0.25) <= 1e-12);
  CHECK(std::abs(k2.agree_p_d1 - 13.0 / 256.0) <= 1e-12);
  CHECK(std::abs(k2.agree_p_d2 - 45.0 / 256.0) <= 1e-12);
  CHECK(std::abs(k2.kept_fraction - 13.0 / 512.0) <= 1e-12);
  CHECK(std::abs(k2.differ_pass_p_d2 - 0.25) <= 1e-12);
  CHECK(std::abs(k2.differ_block_p_d2 - 13.0 / 64.0) <= 1e-12);

  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(rows[i].survival_blocked > rows[i - 1].survival_blocked);
    CHECK(rows[i].agree_ratio > rows[i - 1].agree_ratio);
  }
  CHECK_THROWS_AS(sweep_cycles({0}), ContractViolation);
}
