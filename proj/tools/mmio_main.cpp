// mmio — command-line laboratory for the I/O complexity of Strassen-like
// matrix multiplication CDAGs: graph construction, red-blue pebble schedules,
// dominator/flow analysis, closed-form bounds, lemma verification, and the
// desk-scale report suite.
//
// Exit codes: 0 = success / all checks pass, 1 = verification violation or
// invalid schedule, 2 = usage or configuration error.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmio/bounds.hpp"
#include "mmio/builders.hpp"
#include "mmio/cdag.hpp"
#include "mmio/common.hpp"
#include "mmio/domflow.hpp"
#include "mmio/json_io.hpp"
#include "mmio/lemma_lab.hpp"
#include "mmio/mmspec.hpp"
#include "mmio/pebbles.hpp"
#include "mmio/report.hpp"
#include "mmio/schedules.hpp"

#ifndef MMIO_DATA_DIR
#define MMIO_DATA_DIR "data"
#endif

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

mmio::Json stats_json(const mmio::IoStats& st) {
  mmio::Json j;
  j["io_total"] = st.io_total();
  j["loads"] = st.loads;
  j["stores"] = st.stores;
  j["computes"] = st.computes;
  j["peak_red"] = st.peak_red;
  j["recomputed_vertices"] = st.recomputed_vertices;
  return j;
}

// Doubles that are exact integers print as integers (bounds in the exact
// regime stay drift-free in output).
mmio::Json number_json(double v) {
  if (std::fabs(v - std::llround(v)) < 1e-12 && std::fabs(v) < 9.0e15)
    return mmio::Json(static_cast<int64_t>(std::llround(v)));
  return mmio::Json(v);
}

mmio::MmSpec spec_from_path_or_builtin(const std::string& path) {
  if (path.empty()) return mmio::strassen_2x7_spec();
  return mmio::load_mmspec(mmio::Json::parse(read_file(path)));
}

uint64_t env_seed() {
  if (const char* s = std::getenv("MMIO_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return static_cast<uint64_t>(v);
    throw std::invalid_argument("MMIO_SEED is not an unsigned integer");
  }
  return 42;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmio: I/O-complexity laboratory for Strassen-like CDAGs"};
  app.require_subcommand(1);

  uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--seed", seed, "random seed (overrides MMIO_SEED; default 42)")
      ->each([&](const std::string&) { seed_given = true; });

  // ---- build ----
  std::string b_algo = "strassen", b_spec, b_out, b_dot;
  int64_t b_n = 0;
  auto* cmd_build = app.add_subcommand("build", "construct a CDAG and serialize it");
  cmd_build->add_option("--algo", b_algo, "strassen|naive|like")
      ->check(CLI::IsMember({"strassen", "naive", "like"}));
  cmd_build->add_option("--n", b_n, "matrix dimension")->required();
  cmd_build->add_option("--spec", b_spec, "algorithm spec JSON (like only; default built-in 2x7)");
  cmd_build->add_option("--out", b_out, "output CDAG JSON path")->required();
  cmd_build->add_option("--dot", b_dot, "also write Graphviz DOT here");

  // ---- schedule ----
  std::string s_cdag, s_strategy = "blocked", s_out;
  int64_t s_cache = 0;
  bool s_norec = false;
  auto* cmd_schedule = app.add_subcommand("schedule", "generate and validate a schedule");
  cmd_schedule->add_option("--cdag", s_cdag, "CDAG JSON path")->required();
  cmd_schedule->add_option("--strategy", s_strategy, "blocked|naive")
      ->check(CLI::IsMember({"blocked", "naive"}));
  cmd_schedule->add_option("--cache", s_cache, "cache size M")->required();
  cmd_schedule->add_flag("--no-recompute", s_norec, "validate under the no-recompute rule");
  cmd_schedule->add_option("--out", s_out, "trace output path (JSON Lines)")->required();

  // ---- simulate ----
  std::string m_cdag, m_trace;
  int64_t m_cache = -1;
  bool m_norec = false;
  auto* cmd_simulate = app.add_subcommand("simulate", "replay a schedule trace");
  cmd_simulate->add_option("--cdag", m_cdag, "CDAG JSON path")->required();
  cmd_simulate->add_option("--trace", m_trace, "trace path (JSON Lines)")->required();
  cmd_simulate->add_option("--cache", m_cache, "cache size M (default: trace header)");
  cmd_simulate->add_flag("--no-recompute", m_norec, "validate under the no-recompute rule");

  // ---- bound ----
  std::string f_formula;
  int64_t f_n = 0, f_cache = 0, f_procs = 0, f_n0 = 2, f_m0 = 7, f_q = -1;
  auto* cmd_bound = app.add_subcommand("bound", "evaluate a closed-form lower bound");
  cmd_bound
      ->add_option("--formula", f_formula,
                   "strassen-seq|strassen-par|strassen-like|strassen-like-par|generic-qm|"
                   "generic-qm-par|count-z")
      ->required()
      ->check(CLI::IsMember({"strassen-seq", "strassen-par", "strassen-like",
                             "strassen-like-par", "generic-qm", "generic-qm-par", "count-z"}));
  cmd_bound->add_option("--n", f_n, "matrix dimension");
  cmd_bound->add_option("--cache", f_cache, "cache/local-memory words M");
  cmd_bound->add_option("--procs", f_procs, "processor count P (parallel formulas)");
  cmd_bound->add_option("--n0", f_n0, "Strassen-like base dimension (default 2)");
  cmd_bound->add_option("--m0", f_m0, "Strassen-like multiplication count (default 7)");
  cmd_bound->add_option("--q", f_q, "disjoint sub-problem count (generic formulas)");

  // ---- verify ----
  std::string v_which, v_golden, v_spec;
  int64_t v_n = -1, v_cache = 1, v_level = 1, v_samples = -1, v_copies = 1;
  int64_t v_cap = 1000000;
  auto* cmd_verify = app.add_subcommand("verify", "run a lemma verifier");
  cmd_verify
      ->add_option("which", v_which,
                   "table1|corollary-half|dominator-2m|disjoint-paths|families|flow")
      ->required()
      ->check(CLI::IsMember({"table1", "corollary-half", "dominator-2m", "disjoint-paths",
                             "families", "flow"}));
  cmd_verify->add_option("--golden", v_golden, "golden table CSV (table1)");
  cmd_verify->add_option("--n", v_n, "matrix dimension");
  cmd_verify->add_option("--cache", v_cache, "memory words M (dominator-2m, disjoint-paths)");
  cmd_verify->add_option("--level", v_level, "family recursion level (families)");
  cmd_verify->add_option("--copies", v_copies, "disjoint copy count q (corollary-half)");
  cmd_verify->add_option("--samples", v_samples, "sample count for sampled sweeps");
  cmd_verify->add_option("--exhaustive-cap", v_cap, "max subsets enumerated exhaustively");
  cmd_verify->add_option("--spec", v_spec, "algorithm spec JSON (families)");

  // ---- report ----
  std::string r_suite = "desk", r_out, r_golden;
  auto* cmd_report = app.add_subcommand("report", "run the verification suite, write CSV");
  cmd_report->add_option("--suite", r_suite, "suite name (desk)")
      ->check(CLI::IsMember({"desk"}));
  cmd_report->add_option("--out", r_out, "CSV output path (default stdout)");
  cmd_report->add_option("--golden", r_golden, "golden table CSV override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (!seed_given) seed = env_seed();
    const std::string default_golden = std::string(MMIO_DATA_DIR) + "/table1_encA.csv";

    std::ostringstream cfg;
    cfg << "config: seed=" << seed;
    for (int i = 1; i < argc; ++i) cfg << " " << argv[i];
    std::cerr << cfg.str() << "\n";

    if (cmd_build->parsed()) {
      mmio::BuildResult br;
      const bool want_families = !b_dot.empty();
      if (b_algo == "strassen") {
        br = mmio::build_strassen(b_n, want_families);
      } else if (b_algo == "naive") {
        br = mmio::build_naive(b_n);
      } else {
        br = mmio::build_strassen_like(spec_from_path_or_builtin(b_spec), b_n, want_families);
      }
      write_file(b_out, mmio::to_json_text(br.g));
      if (!b_dot.empty()) {
        const mmio::SubCdagFamily* lvl1 =
            br.report.families.size() > 1 ? &br.report.families[1] : nullptr;
        write_file(b_dot, mmio::to_dot(br.g, lvl1));
      }
      std::cerr << "built " << b_algo << " n=" << b_n << ": " << br.report.n_vertices
                << " vertices, " << br.report.n_edges << " edges\n";
      return 0;
    }

    if (cmd_schedule->parsed()) {
      const mmio::Cdag g = mmio::from_json_text(read_file(s_cdag));
      const mmio::Schedule sched = s_strategy == "blocked"
                                       ? mmio::generate_blocked_schedule(g, s_cache)
                                       : mmio::generate_naive_schedule(g, s_cache);
      const mmio::ValidationResult vr = mmio::validate_schedule(
          g, sched, s_cache, s_norec ? mmio::PebbleMode::NoRecompute : mmio::PebbleMode::Free);
      if (!vr.ok) {
        std::cerr << "error: generated schedule invalid: "
                  << mmio::pebble_error_name(vr.error->kind) << " at move "
                  << vr.error->move_index << "\n";
        return 1;
      }
      std::ofstream out(s_out, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot open output file: " + s_out);
      mmio::write_schedule_jsonl(out, g, sched);
      std::cout << stats_json(vr.stats).dump() << "\n";
      return 0;
    }

    if (cmd_simulate->parsed()) {
      const mmio::Cdag g = mmio::from_json_text(read_file(m_cdag));
      std::ifstream in(m_trace, std::ios::binary);
      if (!in) throw std::invalid_argument("cannot open file: " + m_trace);
      const mmio::Schedule sched = mmio::read_schedule_jsonl(in, g);
      const int64_t M = m_cache > 0 ? m_cache : sched.cache;
      const mmio::ValidationResult vr = mmio::validate_schedule(
          g, sched, M, m_norec ? mmio::PebbleMode::NoRecompute : mmio::PebbleMode::Free);
      if (!vr.ok) {
        // Header occupies line 1; move i sits on line i+2.
        std::cerr << "error: " << mmio::pebble_error_name(vr.error->kind) << " at move "
                  << vr.error->move_index << " (line " << (vr.error->move_index + 2) << "): "
                  << vr.error->detail << "\n";
        return 1;
      }
      std::cout << stats_json(vr.stats).dump() << "\n";
      return 0;
    }

    if (cmd_bound->parsed()) {
      mmio::Json params = mmio::Json::object();
      mmio::Json rec;
      auto need = [&](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("bound: missing/invalid ") + what);
      };
      if (f_formula == "strassen-seq") {
        need(f_n > 0, "--n");
        need(f_cache > 0, "--cache");
        const mmio::BoundValue b = mmio::strassen_seq_bound(f_n, f_cache);
        params["n"] = f_n;
        params["M"] = f_cache;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else if (f_formula == "strassen-par") {
        need(f_n > 0, "--n");
        need(f_cache > 0, "--cache");
        need(f_procs > 0, "--procs");
        const mmio::BoundValue b = mmio::strassen_par_bound(f_n, f_cache, f_procs);
        params["n"] = f_n;
        params["M"] = f_cache;
        params["P"] = f_procs;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else if (f_formula == "strassen-like") {
        need(f_n > 0, "--n");
        need(f_cache > 0, "--cache");
        const mmio::BoundValue b = mmio::strassen_like_bound(f_n, f_cache, f_n0, f_m0);
        params["n"] = f_n;
        params["M"] = f_cache;
        params["n0"] = f_n0;
        params["m0"] = f_m0;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else if (f_formula == "strassen-like-par") {
        need(f_n > 0, "--n");
        need(f_cache > 0, "--cache");
        need(f_procs > 0, "--procs");
        const mmio::BoundValue b =
            mmio::strassen_like_par_bound(f_n, f_cache, f_n0, f_m0, f_procs);
        params["n"] = f_n;
        params["M"] = f_cache;
        params["n0"] = f_n0;
        params["m0"] = f_m0;
        params["P"] = f_procs;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else if (f_formula == "generic-qm") {
        need(f_q >= 0, "--q");
        need(f_cache > 0, "--cache");
        const mmio::BoundValue b = mmio::generic_qM_bound(f_q, f_cache);
        params["q"] = f_q;
        params["M"] = f_cache;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else if (f_formula == "generic-qm-par") {
        need(f_q >= 0, "--q");
        need(f_cache > 0, "--cache");
        need(f_procs > 0, "--procs");
        const mmio::BoundValue b = mmio::generic_qM_par_bound(f_q, f_cache, f_procs);
        params["q"] = f_q;
        params["M"] = f_cache;
        params["P"] = f_procs;
        rec["formula_id"] = b.formula_id;
        rec["value"] = number_json(b.value);
        rec["regime"] = b.regime;
      } else {  // count-z
        need(f_n > 0, "--n");
        need(f_cache > 0, "--cache");
        const int64_t z = mmio::count_Z(f_n, f_cache);
        params["n"] = f_n;
        params["M"] = f_cache;
        rec["formula_id"] = "count-z";
        rec["value"] = z;
        rec["regime"] = "main";
      }
      rec["params"] = params;
      mmio::Json out;
      out["formula_id"] = rec["formula_id"];
      out["params"] = rec["params"];
      out["value"] = rec["value"];
      out["regime"] = rec["regime"];
      std::cout << out.dump() << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      mmio::LemmaVerdict verdict;
      if (v_which == "table1") {
        verdict = mmio::verify_table1(v_golden.empty() ? default_golden : v_golden);
      } else if (v_which == "corollary-half") {
        const int64_t n = v_n > 0 ? v_n : 2;
        const mmio::Cdag g =
            v_copies > 1
                ? mmio::build_disjoint_copies(mmio::strassen_2x7_spec(), n,
                                              static_cast<int>(v_copies))
                      .g
                : mmio::build_strassen(n, false).g;
        verdict = mmio::verify_corollary_half(g);
      } else if (v_which == "dominator-2m") {
        verdict = mmio::verify_dominator_2m(v_n > 0 ? v_n : 4, v_cache, seed, v_cap,
                                            v_samples > 0 ? v_samples : 10000);
      } else if (v_which == "disjoint-paths") {
        verdict = mmio::verify_disjoint_paths(v_n > 0 ? v_n : 4, v_cache,
                                              v_samples > 0 ? v_samples : 500, seed);
      } else if (v_which == "families") {
        const int64_t n = v_n > 0 ? v_n : 8;
        verdict = v_spec.empty()
                      ? mmio::verify_family_disjointness(n, v_level)
                      : mmio::verify_family_disjointness(spec_from_path_or_builtin(v_spec), n,
                                                         v_level);
      } else {  // flow
        verdict = mmio::verify_flow_empirical();
      }
      std::cout << mmio::to_json(verdict).dump() << "\n";
      if (v_which == "table1" && verdict.pass()) {
        std::cerr << "table1: 128/128 match\n";
      } else {
        std::cerr << verdict.lemma_id << ": " << verdict.instances_checked << " checked, "
                  << verdict.violations.size() << " violations (" << verdict.runtime_ms
                  << " ms)\n";
      }
      return verdict.pass() ? 0 : 1;
    }

    if (cmd_report->parsed()) {
      const mmio::DeskReport rep =
          mmio::run_desk_suite(seed, r_golden.empty() ? default_golden : r_golden);
      const std::string csv = mmio::to_csv(rep);
      if (r_out.empty())
        std::cout << csv;
      else
        write_file(r_out, csv);
      int64_t passed = 0;
      for (const mmio::ReportRow& r : rep.rows) passed += r.pass ? 1 : 0;
      std::cerr << "desk suite: " << passed << "/" << rep.rows.size() << " rows pass\n";
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
