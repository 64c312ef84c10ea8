#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "msc99/analysis.hpp"
#include "msc99/protocol.hpp"

// Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

namespace {

using json = nlohmann::ordered_json;
namespace protocol = msc99::protocol;
namespace analysis = msc99::analysis;

// Numbers destined for files go through a fixed 12-significant-digit
// format so outputs are byte-stable across platforms.
std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct RunConfig {
  double c2 = 0.9;
  int n = 1, m = 2, l = 1;
  long long runs = 1;
  std::uint64_t seed = 1;
  int target = 0;
  bool honest = false;
  std::string rep = "compressed";
  std::string out;
};

int cmd_simulate(const RunConfig& cfg) {
  const protocol::ProtocolParams params =
      protocol::ProtocolParams::from_c2(cfg.c2, cfg.n, cfg.m, cfg.l);
  const protocol::Representation rep = protocol::representation_from_name(cfg.rep);

  std::ofstream out_file;
  const bool write_transcripts = !cfg.out.empty();
  if (write_transcripts) {
    out_file.open(cfg.out);
    if (!out_file) {
      std::cerr << "cannot open " << cfg.out << "\n";
      return 3;
    }
  }

  long long zeros = 0, ones = 0, aborts = 0;
  if (cfg.honest) {
    for (long long i = 0; i < cfg.runs; ++i) {
      const protocol::Transcript t =
          protocol::run_honest(params, cfg.seed ^ static_cast<std::uint64_t>(i), rep);
      (t.result == protocol::Trit::kZero   ? zeros
       : t.result == protocol::Trit::kOne ? ones
                                          : aborts)++;
      if (write_transcripts) out_file << protocol::transcript_to_json(t) << "\n";
    }
  } else {
    const protocol::AttackContext ctx(params, rep);
    for (long long i = 0; i < cfg.runs; ++i) {
      const protocol::Transcript t =
          protocol::run_attack(ctx, cfg.target, cfg.seed ^ static_cast<std::uint64_t>(i));
      (t.result == protocol::Trit::kZero   ? zeros
       : t.result == protocol::Trit::kOne ? ones
                                          : aborts)++;
      if (write_transcripts) out_file << protocol::transcript_to_json(t) << "\n";
    }
  }
  if (write_transcripts && !out_file.good()) {
    std::cerr << "write to " << cfg.out << " failed\n";
    return 3;
  }

  const double runs = static_cast<double>(cfg.runs);
  const long long target_count = cfg.honest || cfg.target == 0 ? zeros : ones;
  const double p_hat = target_count / runs;
  const double sigma = std::sqrt(0.25 / runs);

  double bound;
  bool pass;
  if (cfg.honest) {
    bound = 0.5;
    pass = std::abs(p_hat - 0.5) <= 4.0 * sigma && aborts == 0;
  } else {
    const protocol::EffectiveParams e = protocol::effective_params(params);
    bound = cfg.l < cfg.m ? analysis::bias_lower_bound(params)
                          : analysis::bias_bound_effective(0, 1, e.c_eff, e.s_eff);
    pass = p_hat >= bound - 4.0 * sigma;
  }

  json report;
  report["mode"] = cfg.honest ? "honest" : "attack";
  report["c2"] = cfg.c2;
  report["n"] = cfg.n;
  report["m"] = cfg.m;
  report["l"] = cfg.l;
  report["rep"] = cfg.rep;
  report["runs"] = cfg.runs;
  report["seed"] = cfg.seed;
  if (!cfg.honest) report["target"] = cfg.target;
  report["counts"] = {{"0", zeros}, {"1", ones}, {"abort", aborts}};
  report["p_hat"] = p_hat;
  report["stderr"] = std::sqrt(p_hat * (1.0 - p_hat) / runs);
  report["bound"] = bound;
  report["bound_check"] = pass ? "pass" : "fail";
  std::cout << report.dump() << "\n";
  return pass ? 0 : 1;
}

int cmd_curve(int grid, const std::string& out, const std::string& format) {
  if (grid < 1) {
    std::cerr << "grid must be >= 1\n";
    return 2;
  }
  std::vector<double> ks(grid);
  for (int i = 0; i < grid; ++i) ks[i] = (i + 1) / static_cast<double>(grid + 1);
  const std::vector<analysis::BiasCurvePoint> pts = analysis::curve(ks);

  std::string text;
  if (format == "csv") {
    text = "K,p0,bias\n";
    for (const auto& p : pts)
      text += fmt12(p.K) + "," + fmt12(p.p0) + "," + fmt12(p.bias) + "\n";
  } else {
    text = "[";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) text += ",";
      text += "{\"K\":" + fmt12(pts[i].K) + ",\"p0\":" + fmt12(pts[i].p0) +
              ",\"bias\":" + fmt12(pts[i].bias) + "}";
    }
    text += "]\n";
  }

  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    f << text;
    if (!f.good()) {
      std::cerr << "write to " << out << " failed\n";
      return 3;
    }
  }
  return 0;
}

int cmd_optimize(int m) {
  const analysis::Optimum o = analysis::max_bias();
  std::string text = "{\"K_star\":" + fmt12(o.K_star) +
                     ",\"bias_star\":" + fmt12(o.bias_star) +
                     ",\"alpha_star\":" + fmt12(o.alpha_star);
  if (m > 0) {
    const analysis::OptimalL l = analysis::optimal_l(m);
    text += ",\"m\":" + std::to_string(m) + ",\"l_real\":" + fmt12(l.l_real) +
            ",\"l_int\":" + std::to_string(l.l_int) +
            ",\"bias_at_int\":" + fmt12(l.bias_at_int);
  }
  text += "}";
  std::cout << text << "\n";
  return 0;
}

int cmd_crosscheck(int qmax, bool perturb) {
  if (qmax < 1 || qmax > 12) {
    std::cerr << "qmax must lie in 1..12\n";
    return 2;
  }
  constexpr double kTol = 1e-8;
  const std::vector<double> c2s = {0.6, 0.75, 0.9};
  std::vector<json> failures;
  json sweep;
  sweep["qmax"] = qmax;
  sweep["c2"] = c2s;
  sweep["n"] = {1, 2};

  // Closed forms against dense-matrix oracles.
  for (int q = 1; q <= qmax; ++q) {
    for (double c2 : c2s) {
      for (int n : {1, 2}) {
        if (q * n > 12) continue;
        const protocol::ProtocolParams p = protocol::ProtocolParams::from_c2(c2, n, q, 1);
        const protocol::EffectiveParams e = protocol::effective_params(p);
        const auto rho0 = protocol::parity_mixture('B', 0, 1, p, protocol::Representation::kFull);
        const auto rho1 = protocol::parity_mixture('B', 1, 1, p, protocol::Representation::kFull);
        const int q_form = perturb ? q + 1 : q;  // deliberate off-by-one fixture
        const double pe_closed = analysis::pe_parity(q_form, e.c_eff, e.s_eff);
        const double pe_oracle = msc99::quantum::helstrom_pe(rho0.rho, rho1.rho).first;
        const double f_closed = analysis::fidelity_parity(q_form, e.c_eff, e.s_eff);
        const double f_oracle = msc99::quantum::fidelity(rho0.rho, rho1.rho);
        if (std::abs(pe_closed - pe_oracle) > kTol)
          failures.push_back({{"check", "pe_parity"}, {"q", q}, {"c2", c2}, {"n", n},
                              {"closed", pe_closed}, {"oracle", pe_oracle}});
        if (std::abs(f_closed - f_oracle) > kTol)
          failures.push_back({{"check", "fidelity_parity"}, {"q", q}, {"c2", c2}, {"n", n},
                              {"closed", f_closed}, {"oracle", f_oracle}});
      }
    }
  }

  // Compressed vs full attack-run probabilities.
  for (const auto& [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
    for (int l = 1; l <= m; ++l) {
      const protocol::ProtocolParams p = protocol::ProtocolParams::from_c2(0.9, n, m, l);
      for (std::uint64_t seed : {11u, 22u, 33u}) {
        const protocol::Transcript tc =
            protocol::run_attack(p, 0, seed, protocol::Representation::kCompressed);
        const protocol::Transcript tf =
            protocol::run_attack(p, 0, seed, protocol::Representation::kFull);
        bool bad = tc.probs.size() != tf.probs.size();
        double worst = 0.0;
        if (!bad)
          for (std::size_t i = 0; i < tc.probs.size(); ++i)
            worst = std::max(worst, std::abs(tc.probs[i] - tf.probs[i]));
        if (bad || worst > kTol)
          failures.push_back({{"check", "representation"}, {"m", m}, {"n", n}, {"l", l},
                              {"seed", seed}, {"max_diff", bad ? -1.0 : worst}});
      }
    }
  }

  json report;
  report["sweep"] = sweep;
  report["failures"] = failures;
  report["status"] = failures.empty() ? "pass" : "fail";
  std::cout << report.dump() << "\n";
  return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MSC(99) coin-tossing simulator and attack analysis"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo protocol runs");
  sim->add_option("--c2", cfg.c2, "c^2 in (1/2, 1)")
      ->check(CLI::Range(std::nextafter(0.5, 1.0), std::nextafter(1.0, 0.0)));
  sim->add_option("--n", cfg.n, "qubits per committed bit")->check(CLI::PositiveNumber);
  sim->add_option("--m", cfg.m, "bit rounds")->check(CLI::PositiveNumber);
  sim->add_option("--l", cfg.l, "attack round")->check(CLI::PositiveNumber);
  sim->add_option("--runs", cfg.runs, "number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--seed", cfg.seed, "base RNG seed (run i uses seed XOR i)");
  sim->add_option("--target", cfg.target, "cheater's target bit")->check(CLI::Range(0, 1));
  sim->add_flag("--honest", cfg.honest, "both parties honest");
  sim->add_option("--rep", cfg.rep, "state representation")
      ->check(CLI::IsMember({"compressed", "full"}));
  sim->add_option("--out", cfg.out, "transcript output path (JSON lines)");

  int grid = 99;
  std::string curve_out, curve_format = "csv";
  CLI::App* cur = app.add_subcommand("curve", "emit the bias-vs-K curve");
  cur->add_option("--grid", grid, "number of interior grid points");
  cur->add_option("--out", curve_out, "output path (default stdout)");
  cur->add_option("--format", curve_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  int opt_m = 0;
  CLI::App* opt = app.add_subcommand("optimize", "curve maximum and optimal attack round");
  opt->add_option("--m", opt_m, "also report the optimal round for m bit rounds");

  int qmax = 6;
  bool perturb = false;
  CLI::App* cross = app.add_subcommand("crosscheck", "closed forms vs dense oracles");
  cross->add_option("--qmax", qmax, "largest string length in the sweep");
  cross->add_flag("--perturb", perturb)->group("");  // negative-control fixture

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cfg);
    if (cur->parsed()) return cmd_curve(grid, curve_out, curve_format);
    if (opt->parsed()) return cmd_optimize(opt_m);
    if (cross->parsed()) return cmd_crosscheck(qmax, perturb);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
