#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tcqkd/cqze.hpp"
#include "tcqkd/protocol.hpp"

namespace py = pybind11;
using namespace tcqkd;

namespace {

Arm arm_from(const std::string& s) {
  if (s == "B") return Arm::B;
  if (s == "C") return Arm::C;
  throw std::invalid_argument("arm must be 'B' or 'C'");
}

py::dict as_dict(const OutcomeDistribution& d) {
  py::dict out;
  for (Terminal t : kTerminals) out[py::str(std::string(to_string(t)))] = d[t];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact amplitude simulator for tripartite counterfactual QKD";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  py::class_<CqzeTransfer>(m, "CqzeTransfer")
      .def_readonly("a_h", &CqzeTransfer::a_h)
      .def_readonly("a_v", &CqzeTransfer::a_v)
      .def_readonly("p_d3", &CqzeTransfer::p_d3)
      .def_readonly("p_d4", &CqzeTransfer::p_d4)
      .def_property_readonly("survival", &CqzeTransfer::survival)
      .def("__repr__", [](const CqzeTransfer& t) {
        return "CqzeTransfer(a_h=" + std::to_string(t.a_h.real()) +
               ", a_v=" + std::to_string(t.a_v.real()) + ", p_d3=" + std::to_string(t.p_d3) +
               ", p_d4=" + std::to_string(t.p_d4) + ")";
      });

  py::class_<IdealLimit>(m, "IdealLimit")
      .def_readonly("cycles", &IdealLimit::cycles)
      .def_readonly("survival_blocked", &IdealLimit::survival_blocked)
      .def_readonly("survival_unblocked", &IdealLimit::survival_unblocked)
      .def_readonly("fidelity_to_v", &IdealLimit::fidelity_to_v)
      .def_readonly("fidelity_to_h", &IdealLimit::fidelity_to_h);

  m.def(
      "cqze_transfer",
      [](int outer, int inner, bool blocked, const std::string& arm) {
        return cqze_transfer({outer, inner, blocked, arm_from(arm)});
      },
      py::arg("m"), py::arg("n"), py::arg("blocked"), py::arg("arm") = "B");

  m.def("ideal_limit_check", &ideal_limit_check, py::arg("k"));

  m.def(
      "round_distribution",
      [](int bob, int charlie, int outer, int inner) {
        return as_dict(round_distribution(bob, charlie, outer, inner));
      },
      py::arg("bob"), py::arg("charlie"), py::arg("m") = 2, py::arg("n") = 2);

  m.def(
      "run_session",
      [](int outer, int inner, std::uint64_t rounds, std::uint64_t seed, const std::string& tamper_b,
         const std::string& tamper_c, unsigned workers, bool with_rounds) {
        ProtocolConfig cfg;
        cfg.outer_cycles = outer;
        cfg.inner_cycles = inner;
        cfg.rounds = rounds;
        cfg.seed = seed;
        cfg.tamper_b = TamperModel::parse(tamper_b);
        cfg.tamper_c = TamperModel::parse(tamper_c);
        cfg.workers = workers;
        SessionResult r;
        {
          py::gil_scoped_release release;
          r = run_session(cfg);
        }
        py::dict counts;
        for (Terminal t : kTerminals) {
          counts[py::str(std::string(to_string(t)))] = r.record.counts[static_cast<std::size_t>(t)];
        }
        py::dict out;
        out["counts"] = counts;
        out["key_length"] = r.record.sifted_length;
        out["kept_fraction"] = r.record.kept_fraction();
        out["mismatches"] = r.record.mismatches;
        out["qber"] = r.record.qber();
        out["bob_key"] = r.keys.bob_key;
        out["charlie_key"] = r.keys.charlie_key;
        out["kept_rounds"] = r.keys.kept_round_indices;
        if (with_rounds) {
          py::list rows;
          for (const RoundRecord& rr : r.record.rounds) {
            rows.append(py::make_tuple(rr.bob_bit, rr.charlie_bit,
                                       std::string(to_string(rr.outcome.terminal)), rr.kept));
          }
          out["rounds"] = rows;
        }
        return out;
      },
      py::arg("m") = 2, py::arg("n") = 2, py::arg("rounds") = 1000, py::arg("seed") = 0,
      py::arg("tamper_b") = "none", py::arg("tamper_c") = "none", py::arg("workers") = 1,
      py::arg("with_rounds") = false);

  m.def(
      "sift",
      [](const std::vector<std::tuple<int, int, std::string>>& rows) {
        std::vector<RoundRecord> records;
        records.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const auto& [b, c, term] = rows[i];
          const auto t = terminal_from_string(term);
          if (!t) throw std::invalid_argument("unknown terminal: " + term);
          RoundRecord r;
          r.round = i;
          r.bob_bit = b;
          r.charlie_bit = c;
          r.outcome.terminal = *t;
          r.kept = *t == Terminal::D1;
          records.push_back(r);
        }
        const SiftedKeys k = sift(records);
        return py::make_tuple(k.bob_key, k.charlie_key, k.kept_round_indices);
      },
      py::arg("rows"), "rows: (bob_bit, charlie_bit, terminal) per round");

  m.def(
      "audit_counterfactuality",
      [](int outer, int inner, std::uint64_t rounds, std::uint64_t seed) {
        const AuditReport rep = audit_counterfactuality(outer, inner, rounds, seed);
        py::list checks;
        for (const AuditCheck& c : rep.checks) {
          py::dict d;
          d["bits"] = py::make_tuple(c.bob_bit, c.charlie_bit);
          d["arm"] = std::string(to_string(c.arm));
          d["detector"] = std::string(to_string(c.detector));
          d["probability"] = c.probability;
          d["passed"] = c.passed;
          checks.append(d);
        }
        py::list probes;
        for (const ProbeStudy& p : rep.probes) {
          py::dict d;
          d["probed_arm"] = std::string(to_string(p.probed_arm));
          d["bits"] = py::make_tuple(p.bob_bit, p.charlie_bit);
          d["rounds"] = p.rounds;
          d["probe_fired"] = p.probe_fired;
          d["fired_and_click"] = p.fired_and_click;
          probes.append(d);
        }
        py::dict out;
        out["passed"] = rep.all_passed();
        out["checks"] = checks;
        out["probes"] = probes;
        return out;
      },
      py::arg("m") = 2, py::arg("n") = 2, py::arg("rounds") = 20000, py::arg("seed") = 1);

  m.def(
      "sweep_cycles",
      [](const std::vector<int>& ks) {
        py::list rows;
        for (const SweepRow& r : sweep_cycles(ks)) {
          py::dict d;
          d["k"] = r.cycles;
          d["survival_blocked"] = r.survival_blocked;
          d["survival_unblocked"] = r.survival_unblocked;
          d["survival_mean"] = r.survival_mean;
          d["fidelity_to_v"] = r.fidelity_to_v;
          d["fidelity_to_h"] = r.fidelity_to_h;
          d["agree_p_d1"] = r.agree_p_d1;
          d["agree_p_d2"] = r.agree_p_d2;
          d["agree_ratio"] = r.agree_ratio;
          d["kept_fraction"] = r.kept_fraction;
          rows.append(d);
        }
        return rows;
      },
      py::arg("ks"));
}
