// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed here and never tuned.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "../oracle/unrolled_oracle.hpp"
#include "../test_support.hpp"
#include "tcqkd/cqze.hpp"
#include "tcqkd/optics.hpp"
#include "tcqkd/protocol.hpp"

using namespace tcqkd;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string note) {
    if (!ok) passed = false;
    notes.push_back((ok ? "ok    " : "FAILED ") + std::move(note));
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Criterion two_cycle_survival() {
  Criterion c{1, "two-cycle blocked survival is 13/64 and about 1/5"};
  const double s = cqze_transfer({2, 2, true, Arm::B}).survival();
  c.require(std::abs(s - 13.0 / 64.0) <= 1e-12, fmt("survival = %.17g (13/64 = %.17g)", s, 13.0 / 64.0));
  c.require(s >= 0.18 && s <= 0.22, fmt("survival %.6f within [0.18, 0.22]", s));
  return c;
}

Criterion polarization_map() {
  Criterion c{2, "unblocked box outputs pure H; blocked survivor near V at M=N=25"};
  double worst_v = 0.0;
  for (int m = 1; m <= 32; ++m) {
    for (int n = 1; n <= 32; ++n) {
      worst_v = std::max(worst_v, std::abs(cqze_transfer({m, n, false, Arm::B}).a_v));
    }
  }
  c.require(worst_v < 1e-12, fmt("max |a_V| unblocked over M,N in [1,32] = %.3g (< 1e-12)", worst_v));
  const double fid = ideal_limit_check(25).fidelity_to_v;
  c.require(fid > 0.99, fmt("blocked fidelity to V at M=N=25 = %.6f (> 0.99)", fid));
  return c;
}

Criterion d2_certainty() {
  Criterion c{3, "differing bits never light D1; survivors all reach D2"};
  double worst_d1 = 0.0, worst_share = 0.0;
  for (int m = 1; m <= 32; ++m) {
    for (int n = 1; n <= 32; ++n) {
      for (auto [b, ch] : {std::pair{0, 1}, std::pair{1, 0}}) {
        const auto d = round_distribution(b, ch, m, n);
        worst_d1 = std::max(worst_d1, d[Terminal::D1]);
        const double surv = d[Terminal::D1] + d[Terminal::D2];
        if (surv > 0.0) worst_share = std::max(worst_share, d[Terminal::D1] / surv);
      }
    }
  }
  c.require(worst_d1 < 1e-12, fmt("max P(D1 | bits differ) = %.3g (< 1e-12)", worst_d1));
  c.require(worst_share < 1e-12, fmt("max P(D1)/(P(D1)+P(D2)) = %.3g (< 1e-12)", worst_share));
  return c;
}

Criterion agree_statistics() {
  Criterion c{4, "agree-case D1/D2 split"};
  const auto d = round_distribution(0, 0, 2, 2);
  c.require(std::abs(d[Terminal::D1] - 13.0 / 256.0) <= 1e-12,
            fmt("M=N=2 P(D1) = %.17g (13/256 = %.17g)", d[Terminal::D1], 13.0 / 256.0));
  c.require(std::abs(d[Terminal::D2] - 45.0 / 256.0) <= 1e-12,
            fmt("M=N=2 P(D2) = %.17g (45/256 = %.17g)", d[Terminal::D2], 45.0 / 256.0));
  const auto d25 = round_distribution(0, 0, 25, 25);
  const double ratio = d25[Terminal::D1] / d25[Terminal::D2];
  c.require(ratio >= 0.96 && ratio <= 1.04, fmt("M=N=25 P(D1)/P(D2) = %.6f (in [0.96, 1.04])", ratio));
  return c;
}

Criterion sifting() {
  Criterion c{5, "10^6-round noiseless session: equal keys, kept fraction near 13/512"};
  ProtocolConfig cfg;
  cfg.rounds = 1'000'000;
  cfg.seed = 42;
  cfg.workers = 4;
  const auto r = run_session(cfg);
  c.require(r.keys.bob_key == r.keys.charlie_key && r.record.qber() == 0.0,
            fmt("key length %.0f, mismatches %.0f", double(r.record.sifted_length),
                double(r.record.mismatches)));
  const double p = 13.0 / 512.0;
  const double se = std::sqrt(p * (1 - p) / double(cfg.rounds));
  const double f = r.record.kept_fraction();
  c.require(std::abs(f - p) <= 3 * se,
            fmt("kept fraction %.6f, |diff|/SE = %.2f (<= 3)", f, std::abs(f - p) / se));
  return c;
}

Criterion counterfactuality() {
  Criterion c{6, "channel empty at release; guard detectors dark; losses ledgered"};
  bool all_ok = true;
  double worst_guard = 0.0, worst_residual = 0.0, worst_unaccounted = 0.0;
  for (int m : {1, 2, 3, 4, 5, 6, 10, 25}) {
    for (int n : {1, 2, 3, 4, 5, 6, 10, 25}) {
      const auto rep = audit_counterfactuality(m, n, 0);
      all_ok = all_ok && rep.all_passed();
      for (const auto& chk : rep.checks) worst_guard = std::max(worst_guard, chk.probability);
      for (const auto& a : rep.accounting) {
        worst_residual = std::max(worst_residual, a.channel_residual);
        worst_unaccounted = std::max(worst_unaccounted, a.unaccounted);
      }
    }
  }
  c.require(worst_residual == 0.0, fmt("max channel probability at release = %.3g (exactly 0)", worst_residual));
  c.require(worst_guard <= 1e-9,
            fmt("max P(D3 | blocked arm), P(D4 | passing arm) = %.3g (<= 1e-9)", worst_guard));
  c.require(worst_unaccounted <= 1e-12,
            fmt("max |1 - P(D1) - P(D2) - P(D3/D4 ledger)| = %.3g (<= 1e-12)", worst_unaccounted));
  c.require(all_ok, "audit reports pass on every grid point");
  return c;
}

Criterion conservation_and_oracles() {
  Criterion c{7, "conservation, oracle equivalence, Monte Carlo consistency"};

  // (a) Randomized component sequences.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ang(-3.2, 3.2);
  std::uniform_int_distribution<int> pick(0, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    PhotonState s = testing_support::random_state(gen);
    for (int step = 0; step < 30; ++step) {
      const auto a = testing_support::random_mode(gen);
      auto b = testing_support::random_mode(gen);
      if (b == a) b = static_cast<ModeLabel>((static_cast<std::size_t>(a) + 1) % kModeCount);
      switch (pick(gen)) {
        case 0: s = beamsplitter(s, a, b); break;
        case 1: s = polarization_rotator(s, a, {ang(gen)}); break;
        case 2: s = pbs(s, a, b, a); break;
        case 3: s = pockels_cell(s, a, true); break;
        case 4: s = mirror(s, a); break;
        case 5: s = absorb(s, a, Polarization::H, DetectorId::D3B); break;
      }
      worst = std::max(worst, std::abs(total_probability(s) - 1.0));
    }
  }
  c.require(worst <= 1e-12, fmt("1000 random sequences, max |total - 1| = %.3g (<= 1e-12)", worst));

  // (b) Independent unrolled oracle.
  double worst_oracle = 0.0;
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      for (bool blocked : {false, true}) {
        const auto got = cqze_transfer({m, n, blocked, Arm::B});
        const auto want = oracle::unrolled_box(m, n, blocked);
        for (double e : {std::abs(got.a_h - ComplexAmp{want.h, 0}), std::abs(got.a_v - ComplexAmp{want.v, 0}),
                         std::abs(got.p_d3 - want.d3), std::abs(got.p_d4 - want.d4)}) {
          worst_oracle = std::max(worst_oracle, e);
        }
      }
    }
  }
  c.require(worst_oracle <= 1e-12, fmt("cqze_transfer vs unrolled oracle, M,N <= 6: max diff %.3g", worst_oracle));

  // (c) Monte Carlo against exact distributions, 10^6 samples per bit pair.
  ProtocolConfig cfg;
  const RoundSampler sampler(cfg);
  double worst_z = 0.0;
  bool zero_ok = true;
  for (int b = 0; b <= 1; ++b) {
    for (int ch = 0; ch <= 1; ++ch) {
      const auto exact = round_distribution(b, ch, 2, 2);
      const CounterRng rng(1000 + 2 * b + ch);
      std::array<double, kTerminalCount> counts{};
      constexpr std::uint64_t kSamples = 1'000'000;
      for (std::uint64_t i = 0; i < kSamples; ++i) {
        RoundStream stream(rng, i);
        ++counts[static_cast<std::size_t>(sampler.sample(b, ch, stream).terminal)];
      }
      for (Terminal t : kTerminals) {
        const double p = exact[t];
        const double n = counts[static_cast<std::size_t>(t)];
        if (p <= 1e-12) {
          zero_ok = zero_ok && n == 0;
          continue;
        }
        const double se = std::sqrt(p * (1 - p) / kSamples);
        worst_z = std::max(worst_z, std::abs(n / kSamples - p) / se);
      }
    }
  }
  c.require(worst_z <= 5.0 && zero_ok,
            fmt("max |freq - p|/SE over terminals and bit pairs = %.2f (<= 5)", worst_z));
  return c;
}

}  // namespace

int main() {
  const std::vector<Criterion> results{two_cycle_survival(), polarization_map(), d2_certainty(),
                                       agree_statistics(),   sifting(),          counterfactuality(),
                                       conservation_and_oracles()};
  int failures = 0;
  for (const auto& c : results) {
    std::printf("[%s] criterion %d: %s\n", c.passed ? "PASS" : "FAIL", c.id, c.title.c_str());
    for (const auto& n : c.notes) std::printf("         %s\n", n.c_str());
    failures += !c.passed;
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}
