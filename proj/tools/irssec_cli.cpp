#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "irssec/harness.hpp"

namespace fs = std::filesystem;
using namespace irssec;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void parse_sweep(const std::string& text, ExperimentSpec& spec) {
  if (text.empty() || text == "none") return;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ScenarioError("sweep", "expected <axis>=<v1,v2,...>");
  spec.axis = parse_axis(text.substr(0, eq));
  for (const auto& v : split_list(text.substr(eq + 1))) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) throw ScenarioError("sweep", "not a number: '" + v + "'");
    spec.values.push_back(d);
  }
}

int cmd_run(const std::string& scenario, const std::string& sweep, const std::string& algos, const std::string& csi,
            int seeds, const std::string& out, int threads, bool warm, bool quiet) {
  ExperimentSpec spec;
  spec.base = scenario.empty() ? Scenario{} : load_scenario(scenario);
  parse_sweep(sweep, spec);
  for (const auto& a : split_list(algos)) spec.algorithms.push_back(parse_algo(a));
  if (csi != "perfect" && csi != "robust") throw ScenarioError("csi", "expected perfect or robust");
  spec.robust = csi == "robust";
  spec.seeds = seeds;
  spec.out = out;
  spec.threads = threads;
  spec.init = warm ? InitMode::LbrWarm : InitMode::Random;
  spec.validate();

  const auto records = run_experiment(spec, [&](const RunRecord& r) {
    if (!quiet)
      std::fprintf(stderr, "%s %s %s=%g seed %d: %s, min-SR %.4f bps/Hz, %d iterations, %.2f s\n",
                   r.algorithm.c_str(), r.csi.c_str(), r.axis.c_str(), r.axis_value, r.seed, r.status.c_str(),
                   r.min_sr, r.iterations, r.wall_seconds);
  });
  write_experiment(spec, records);
  int bad = 0;
  for (const auto& r : records) bad += r.status != "Converged";
  std::printf("%zu runs written to %s; %d not converged\n", records.size(), out.c_str(), bad);
  return bad ? 1 : 0;
}

int cmd_plot(const std::string& in, const std::string& fig_name, const std::string& out) {
  const Figure fig = parse_figure(fig_name);
  auto records = parse_csv(in);
  if (fig == Figure::Convergence) {
    const fs::path traces = fs::path(in).parent_path() / "traces.csv";
    load_traces(records, traces);
  }
  emit_plot(records, fig, out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_validate(const std::string& in, int samples) {
  const fs::path dir(in);
  const Scenario base = load_scenario(dir / "scenario.txt");
  std::ifstream meta_in(dir / "experiment.json");
  if (!meta_in) throw std::runtime_error("cannot read " + (dir / "experiment.json").string());
  const auto meta = nlohmann::json::parse(meta_in);
  ExperimentSpec spec;
  spec.base = base;
  spec.axis = parse_axis(meta.at("axis").get<std::string>());

  auto records = parse_csv(dir / "records.csv");
  load_designs(records, dir / "designs.json");
  int failures = 0, checked = 0;
  for (const auto& r : records) {
    if (r.status != "Converged") {
      std::printf("FAIL %s seed %d %s=%g: status %s %s\n", r.algorithm.c_str(), r.seed, r.axis.c_str(),
                  r.axis_value, r.status.c_str(), r.diagnostic.c_str());
      ++failures;
      continue;
    }
    if (r.csi != "robust") continue;
    const Scenario sc = scenario_at(spec, r.axis_value);
    const ValidationResult v = validate_robustness(r, sc, samples);
    ++checked;
    if (!v.pass) {
      std::printf("FAIL %s seed %d %s=%g: %s\n", r.algorithm.c_str(), r.seed, r.axis.c_str(), r.axis_value,
                  v.message.c_str());
      ++failures;
    } else {
      std::printf("ok   %s seed %d %s=%g: worst margin %.3e bps/Hz\n", r.algorithm.c_str(), r.seed, r.axis.c_str(),
                  r.axis_value, v.worst_margin);
    }
  }
  std::printf("%zu records, %d robustness checks, %d failures\n", records.size(), checked, failures);
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure IRS-assisted downlink beamforming: experiments, plots and robustness checks"};
  app.require_subcommand(1);

  std::string scenario, sweep, algos = "maxmin-fbr", csi = "perfect", out = "out";
  int seeds = 1, threads = 0;
  bool warm = false, quiet = false;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment");
  run->add_option("--scenario", scenario, "Scenario file (defaults apply when omitted)");
  run->add_option("--sweep", sweep, "<axis>=<v1,v2,...> with axis in delta, K, t_t, M");
  run->add_option("--algos", algos, "Comma list of maxmin-fbr, maxmin-lbr, ssr-fbr, ssr-lbr");
  run->add_option("--csi", csi, "perfect or robust");
  run->add_option("--seeds", seeds, "Channel realizations per point")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0: all cores)");
  run->add_flag("--lbr-warm", warm, "Start every run from the long-blocklength solution");
  run->add_flag("--quiet", quiet, "No per-run progress");

  std::string in, fig, plot_out;
  auto* plot = app.add_subcommand("plot", "Render a figure from records.csv");
  plot->add_option("--in", in, "records.csv")->required();
  plot->add_option("--fig", fig, "convergence, sr-dist, jain-vs-delta, minsr-vs-delta, minsr-vs-K, minsr-vs-tt")
      ->required();
  plot->add_option("--out", plot_out, "Output .svg")->required();

  std::string vin;
  int samples = 1000;
  auto* validate = app.add_subcommand("validate", "Check run statuses and robust certificates by sampling");
  validate->add_option("--in", vin, "Experiment directory")->required();
  validate->add_option("--samples", samples, "Error samples per node")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario, sweep, algos, csi, seeds, out, threads, warm, quiet);
    if (*plot) return cmd_plot(in, fig, plot_out);
    if (*validate) return cmd_validate(vin, samples);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
