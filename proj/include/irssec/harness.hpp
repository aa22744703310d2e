#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "irssec/algorithms.hpp"
#include "irssec/channel.hpp"

namespace irssec {

// Scenario files: one `key = value` per line, `#` comments, optional
// `[section]` headers that prefix the following keys. Keys are dotted
// (`system.M`, `csi.delta`); a bare name is accepted when it matches exactly
// one known key's last component (`M = 32`).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);
void apply_setting(Scenario& sc, const std::string& key, const std::string& value);
std::string format_scenario(const Scenario& sc);
std::vector<std::string> scenario_keys();
std::string scenario_hash(const Scenario& sc);

enum class SweepAxis { None, Delta, K, TT, M };
const char* to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);
void apply_axis(Scenario& sc, SweepAxis axis, double value);

struct AlgoSpec {
  Objective objective = Objective::MaxMin;
  bool fbr = true;
  std::string name() const;
};
AlgoSpec parse_algo(const std::string& s);

struct ExperimentSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;
  std::vector<AlgoSpec> algorithms;
  bool robust = false;
  int seeds = 1;
  std::filesystem::path out;
  InitMode init = InitMode::Random;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct RunRecord {
  std::string scenario_hash;
  int seed = 0;
  std::string algorithm;
  std::string csi;
  std::string axis;
  double axis_value = 0;
  double min_sr = 0;                // bps/Hz
  std::vector<double> user_sr;      // bps/Hz
  double ssr = 0;                   // bps/Hz
  double jain = 0;                  // NaN when every rate is zero
  double certified = 0;             // bps/Hz; robust runs only
  std::vector<double> certified_users;
  int iterations = 0;
  double wall_seconds = 0;
  std::string status;
  std::string diagnostic;

  // Not serialized to records.csv.
  DesignState design;
  std::vector<double> objective_series;  // bps/Hz, index 0 = initial point
};

bool same_record(const RunRecord& a, const RunRecord& b);  // compares every serialized field

// Channel seed for run index i under a master seed; shared by every algorithm
// and axis value so comparisons are paired.
std::uint64_t run_seed(const Scenario& base, int seed_index);

// Scenario actually simulated for one axis value.
Scenario scenario_at(const ExperimentSpec& spec, double axis_value);

RunRecord run_single(const Scenario& sc, const AlgoSpec& algo, bool robust, int seed_index, std::uint64_t seed,
                     InitMode init, const std::string& axis, double axis_value);

using ProgressFn = std::function<void(const RunRecord&)>;
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

void sort_records(std::vector<RunRecord>& records);

struct ValidationResult {
  bool pass = true;
  double worst_margin = 0;  // min_k (worst sampled rate - certified), bps/Hz
  int violating_user = -1;
  int violating_sample = -1;
  std::string message;
};

ValidationResult validate_robustness(const RunRecord& record, const Scenario& sc, int samples,
                                     double tol_nats = 1e-4);

// records.csv: header row then one record per line; rates in bps/Hz, per-user
// lists separated by ';'. Wall times go to a timing sidecar so the data file
// is byte-stable across identical runs.
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> parse_csv(const std::filesystem::path& path);
std::string csv_header();

void emit_traces(const std::vector<RunRecord>& records, const std::filesystem::path& path);
void emit_designs(const std::vector<RunRecord>& records, const std::filesystem::path& path);
void load_designs(std::vector<RunRecord>& records, const std::filesystem::path& path);

void write_experiment(const ExperimentSpec& spec, const std::vector<RunRecord>& records);

enum class Figure { Convergence, SrDist, JainVsDelta, MinSrVsDelta, MinSrVsK, MinSrVsTt };
Figure parse_figure(const std::string& s);
const char* to_string(Figure f);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct FigureData {
  std::string title, xlabel, ylabel;
  bool bars = false;
  std::vector<Series> series;
};

FigureData figure_data(const std::vector<RunRecord>& records, Figure fig);
std::string render_svg(const FigureData& fig);
// Writes the SVG to `path` and the plotted values next to it (same stem, .csv).
void emit_plot(const std::vector<RunRecord>& records, Figure fig, const std::filesystem::path& path);

// Convergence traces are stored separately; this reads them back into the records.
void load_traces(std::vector<RunRecord>& records, const std::filesystem::path& path);

}  // namespace irssec
