// opse: experiment runner for variational pure-state-ensemble optimization.
//
// Subcommands: landscape, converge, variance, haar-check, witness.
// Every run writes a JSON result (and a CSV payload where applicable) that
// embeds the resolved configuration, the seed and the library version.
//
// Exit codes: 0 success, 2 validation failure, 3 check-suite failure,
// 4 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "opse/runs.hpp"
#include "opse/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailure = 3;
constexpr int kExitIo = 4;

// Config-file keys mirror the long flag names. Flags given on the command
// line override file values; unknown keys are hard errors.
template <typename Setter>
void apply_config_file(const std::string& path,
                       const std::map<std::string, Setter>& setters) {
  if (path.empty()) {
    return;
  }
  const auto kv = opse::parse_config_file(opse::read_file(path));
  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
    it->second(value);
  }
}

std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }
int to_int(const std::string& s) { return std::stoi(s); }
double to_double(const std::string& s) { return std::stod(s); }

void write_outputs(const opse::CommandOutput& out, const std::string& base) {
  if (!out.csv.empty()) {
    opse::write_file(base + ".csv", out.csv);
  }
  opse::write_file(base + ".json", out.json);
  std::printf("%s\n", out.summary.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational optimization of pure-state ensembles"};
  app.set_version_flag("--version", std::string("opse ") + opse::kVersion);
  app.require_subcommand(1);

  // ---- landscape ----
  auto* landscape = app.add_subcommand("landscape", "2-parameter cost grid over [0,2pi)^2");
  opse::LandscapeConfig lc;
  std::string l_out = "landscape_result";
  std::string l_config;
  landscape->add_option("--density", lc.density_path, "density JSON (default: maximally mixed)");
  landscape->add_option("--measure", lc.measure, "tsallis-fd|eof|convex-roof-tsallis");
  landscape->add_option("--f", lc.f, "square|identity");
  landscape->add_option("--ancilla-qubits", lc.ancilla_qubits, "ancilla register size");
  landscape->add_option("--grid", lc.grid, "grid resolution per axis");
  landscape->add_option("--shots", lc.shots, "0 = exact, else shot-sampled");
  landscape->add_option("--seed", lc.seed, "RNG seed");
  landscape->add_option("--out", l_out, "output base path");
  landscape->add_option("--config", l_config, "key=value config file");

  // ---- converge ----
  auto* converge = app.add_subcommand("converge", "optimizer trace for one density");
  opse::ConvergeConfig cc;
  std::string c_out = "converge_result";
  std::string c_config;
  converge->add_option("--density", cc.density_path, "density JSON (default: maximally mixed)");
  converge->add_option("--measure", cc.measure, "tsallis-fd|eof|convex-roof-tsallis");
  converge->add_option("--f", cc.f, "square|identity");
  converge->add_option("--ancilla-qubits", cc.ancilla_qubits, "ancilla register size");
  converge->add_option("--depth", cc.depth, "ansatz depth");
  converge->add_option("--lr", cc.learning_rate, "learning rate");
  converge->add_option("--iters", cc.max_iters, "iteration budget per restart");
  converge->add_option("--restarts", cc.restarts, "optimizer restarts");
  converge->add_option("--shots", cc.shots, "0 = exact, else shot-estimated final cost");
  converge->add_option("--seed", cc.seed, "RNG seed");
  converge->add_option("--out", c_out, "output base path");
  converge->add_option("--config", c_config, "key=value config file");

  // ---- variance ----
  auto* variance = app.add_subcommand("variance", "gradient variance scan over ancilla sizes");
  opse::VarianceCmdConfig vc;
  std::string v_out = "variance_result";
  std::string v_config;
  variance->add_option("--density", vc.density_path, "density JSON (default: maximally mixed)");
  variance->add_option("--k-min", vc.k_min, "smallest ancilla qubit count");
  variance->add_option("--k-max", vc.k_max, "largest ancilla qubit count");
  variance->add_option("--mode", vc.mode, "haar-exact|ansatz");
  variance->add_option("--depth", vc.depth, "layers per circuit piece (ansatz mode)");
  variance->add_option("--samples", vc.samples, "draws per k");
  variance->add_option("--layer-index", vc.layer_index, "theta_j to differentiate (0 = middle)");
  variance->add_option("--workers", vc.workers, "worker threads");
  variance->add_option("--shots", vc.shots, "must be 0; the scan is analytic");
  variance->add_option("--seed", vc.seed, "RNG seed");
  variance->add_option("--out", v_out, "output base path");
  variance->add_option("--config", v_config, "key=value config file");

  // ---- haar-check ----
  auto* haar = app.add_subcommand("haar-check", "Weingarten / fidelity / shot-complexity checks");
  opse::HaarCheckConfig hc;
  std::string h_out = "haar_check_result";
  std::string h_config;
  std::uint64_t h_samples = hc.samples;
  haar->add_option("--samples", h_samples, "Monte Carlo samples per dimension");
  haar->add_option("--shots", hc.shots, "must be 0; checks are moment averages");
  haar->add_option("--seed", hc.seed, "RNG seed");
  haar->add_option("--out", h_out, "output base path");
  haar->add_option("--config", h_config, "key=value config file");

  // ---- witness ----
  auto* witness = app.add_subcommand("witness", "separability evidence for a density file");
  opse::WitnessConfig wc;
  std::string w_out = "witness_result";
  std::string w_config;
  witness->add_option("--density", wc.density_path, "density JSON file")->required();
  witness->add_option("--measure", wc.measure, "tsallis-fd|eof|convex-roof-tsallis");
  witness->add_option("--f", wc.f, "square|identity");
  witness->add_option("--ancilla-qubits", wc.ancilla_qubits, "0 = match system dimension");
  witness->add_option("--threshold", wc.threshold, "separability threshold");
  witness->add_option("--depth", wc.depth, "ansatz depth");
  witness->add_option("--lr", wc.learning_rate, "learning rate");
  witness->add_option("--iters", wc.max_iters, "iteration budget per restart");
  witness->add_option("--restarts", wc.restarts, "optimizer restarts");
  witness->add_option("--shots", wc.shots, "0 = exact, else shot-estimated verdict cost");
  witness->add_option("--seed", wc.seed, "RNG seed");
  witness->add_option("--out", w_out, "output base path");
  witness->add_option("--config", w_config, "key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (landscape->parsed()) {
      apply_config_file<std::function<void(const std::string&)>>(
          l_config,
          {
              {"density", [&](const std::string& v) { if (!landscape->count("--density")) lc.density_path = v; }},
              {"measure", [&](const std::string& v) { if (!landscape->count("--measure")) lc.measure = v; }},
              {"f", [&](const std::string& v) { if (!landscape->count("--f")) lc.f = v; }},
              {"ancilla-qubits", [&](const std::string& v) { if (!landscape->count("--ancilla-qubits")) lc.ancilla_qubits = to_int(v); }},
              {"grid", [&](const std::string& v) { if (!landscape->count("--grid")) lc.grid = to_int(v); }},
              {"shots", [&](const std::string& v) { if (!landscape->count("--shots")) lc.shots = to_u64(v); }},
              {"seed", [&](const std::string& v) { if (!landscape->count("--seed")) lc.seed = to_u64(v); }},
          });
      write_outputs(opse::run_landscape(lc), l_out);
      return kExitOk;
    }
    if (converge->parsed()) {
      apply_config_file<std::function<void(const std::string&)>>(
          c_config,
          {
              {"density", [&](const std::string& v) { if (!converge->count("--density")) cc.density_path = v; }},
              {"measure", [&](const std::string& v) { if (!converge->count("--measure")) cc.measure = v; }},
              {"f", [&](const std::string& v) { if (!converge->count("--f")) cc.f = v; }},
              {"ancilla-qubits", [&](const std::string& v) { if (!converge->count("--ancilla-qubits")) cc.ancilla_qubits = to_int(v); }},
              {"depth", [&](const std::string& v) { if (!converge->count("--depth")) cc.depth = to_int(v); }},
              {"lr", [&](const std::string& v) { if (!converge->count("--lr")) cc.learning_rate = to_double(v); }},
              {"iters", [&](const std::string& v) { if (!converge->count("--iters")) cc.max_iters = to_int(v); }},
              {"restarts", [&](const std::string& v) { if (!converge->count("--restarts")) cc.restarts = to_int(v); }},
              {"shots", [&](const std::string& v) { if (!converge->count("--shots")) cc.shots = to_u64(v); }},
              {"seed", [&](const std::string& v) { if (!converge->count("--seed")) cc.seed = to_u64(v); }},
          });
      write_outputs(opse::run_converge(cc), c_out);
      return kExitOk;
    }
    if (variance->parsed()) {
      apply_config_file<std::function<void(const std::string&)>>(
          v_config,
          {
              {"density", [&](const std::string& v) { if (!variance->count("--density")) vc.density_path = v; }},
              {"k-min", [&](const std::string& v) { if (!variance->count("--k-min")) vc.k_min = to_int(v); }},
              {"k-max", [&](const std::string& v) { if (!variance->count("--k-max")) vc.k_max = to_int(v); }},
              {"mode", [&](const std::string& v) { if (!variance->count("--mode")) vc.mode = v; }},
              {"depth", [&](const std::string& v) { if (!variance->count("--depth")) vc.depth = to_int(v); }},
              {"samples", [&](const std::string& v) { if (!variance->count("--samples")) vc.samples = to_int(v); }},
              {"layer-index", [&](const std::string& v) { if (!variance->count("--layer-index")) vc.layer_index = to_int(v); }},
              {"workers", [&](const std::string& v) { if (!variance->count("--workers")) vc.workers = to_int(v); }},
              {"shots", [&](const std::string& v) { if (!variance->count("--shots")) vc.shots = to_u64(v); }},
              {"seed", [&](const std::string& v) { if (!variance->count("--seed")) vc.seed = to_u64(v); }},
          });
      write_outputs(opse::run_variance(vc), v_out);
      return kExitOk;
    }
    if (haar->parsed()) {
      apply_config_file<std::function<void(const std::string&)>>(
          h_config,
          {
              {"samples", [&](const std::string& v) { if (!haar->count("--samples")) h_samples = to_u64(v); }},
              {"shots", [&](const std::string& v) { if (!haar->count("--shots")) hc.shots = to_u64(v); }},
              {"seed", [&](const std::string& v) { if (!haar->count("--seed")) hc.seed = to_u64(v); }},
          });
      hc.samples = h_samples;
      const opse::CommandOutput out = opse::run_haar_check(hc);
      write_outputs(out, h_out);
      return out.passed ? kExitOk : kExitCheckFailure;
    }
    if (witness->parsed()) {
      apply_config_file<std::function<void(const std::string&)>>(
          w_config,
          {
              {"density", [&](const std::string& v) { if (!witness->count("--density")) wc.density_path = v; }},
              {"measure", [&](const std::string& v) { if (!witness->count("--measure")) wc.measure = v; }},
              {"f", [&](const std::string& v) { if (!witness->count("--f")) wc.f = v; }},
              {"ancilla-qubits", [&](const std::string& v) { if (!witness->count("--ancilla-qubits")) wc.ancilla_qubits = to_int(v); }},
              {"threshold", [&](const std::string& v) { if (!witness->count("--threshold")) wc.threshold = to_double(v); }},
              {"depth", [&](const std::string& v) { if (!witness->count("--depth")) wc.depth = to_int(v); }},
              {"lr", [&](const std::string& v) { if (!witness->count("--lr")) wc.learning_rate = to_double(v); }},
              {"iters", [&](const std::string& v) { if (!witness->count("--iters")) wc.max_iters = to_int(v); }},
              {"restarts", [&](const std::string& v) { if (!witness->count("--restarts")) wc.restarts = to_int(v); }},
              {"shots", [&](const std::string& v) { if (!witness->count("--shots")) wc.shots = to_u64(v); }},
              {"seed", [&](const std::string& v) { if (!witness->count("--seed")) wc.seed = to_u64(v); }},
          });
      write_outputs(opse::run_witness(wc), w_out);
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
