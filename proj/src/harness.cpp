#include "irssec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace irssec {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw ScenarioError(key, "not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ScenarioError(key, "not an integer: '" + text + "'");
  return int(v);
}

struct Setting {
  std::string key;
  std::function<std::string(const Scenario&)> get;  // empty for aliases
  std::function<void(Scenario&, const std::string&)> set;
};

#define REAL(name, field)                                                                 \
  Setting {                                                                               \
    name, [](const Scenario& s) { return fmt(s.field); },                                 \
        [](Scenario& s, const std::string& v) { s.field = parse_double(name, v); }        \
  }
#define INT(name, field)                                                                  \
  Setting {                                                                               \
    name, [](const Scenario& s) { return std::to_string(s.field); },                      \
        [](Scenario& s, const std::string& v) { s.field = parse_int(name, v); }           \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      INT("system.N", N),
      INT("system.M", M),
      INT("system.K", K),
      Setting{"system.seed", [](const Scenario& s) { return std::to_string(s.seed); },
              [](Scenario& s, const std::string& v) {
                const double d = parse_double("system.seed", v);
                if (d < 0 || d != std::floor(d)) throw ScenarioError("system.seed", "must be a non-negative integer");
                s.seed = std::uint64_t(d);
              }},
      Setting{"power.P_dbm", [](const Scenario& s) { return fmt(10.0 * std::log10(s.P * 1e3)); },
              [](Scenario& s, const std::string& v) { s.P = dbm_to_watt(parse_double("power.P_dbm", v)); }},
      REAL("power.noise_dbm_hz", noise_density),
      REAL("power.G_A", G_A),
      REAL("power.G_IRS", G_IRS),
      REAL("fbr.bandwidth", bandwidth),
      REAL("fbr.t_t", t_t),
      REAL("fbr.tau_k", tau_k),
      REAL("fbr.tau_e", tau_e),
      Setting{"fbr.tau", {},
              [](Scenario& s, const std::string& v) { s.tau_k = s.tau_e = parse_double("fbr.tau", v); }},
      REAL("csi.delta_k", delta_k),
      REAL("csi.delta_e", delta_e),
      Setting{"csi.delta", {},
              [](Scenario& s, const std::string& v) { s.delta_k = s.delta_e = parse_double("csi.delta", v); }},
      REAL("channel.rician_K", rician_K),
      REAL("geometry.alice.x", geometry.alice.x),
      REAL("geometry.alice.y", geometry.alice.y),
      REAL("geometry.alice.z", geometry.alice.z),
      REAL("geometry.irs.x", geometry.irs.x),
      REAL("geometry.irs.y", geometry.irs.y),
      REAL("geometry.irs.z", geometry.irs.z),
      REAL("geometry.users.x0", geometry.users.x0),
      REAL("geometry.users.x1", geometry.users.x1),
      REAL("geometry.users.y0", geometry.users.y0),
      REAL("geometry.users.y1", geometry.users.y1),
      REAL("geometry.users.height", geometry.users.height),
      REAL("geometry.eve.x0", geometry.eve.x0),
      REAL("geometry.eve.x1", geometry.eve.x1),
      REAL("geometry.eve.y0", geometry.eve.y0),
      REAL("geometry.eve.y1", geometry.eve.y1),
      REAL("geometry.eve.height", geometry.eve.height),
      REAL("geometry.eve_min_distance", geometry.eve_min_distance),
      REAL("solver.eps_t", eps_t),
      REAL("solver.eps_t1", eps_t1),
      REAL("solver.eps_t2", eps_t2),
      INT("solver.ao_max", ao_max),
      REAL("pccp.a_init", a_init),
      REAL("pccp.a_max", a_max),
      REAL("pccp.nu", nu),
      INT("pccp.n_max", n_max),
  };
  return table;
}

#undef REAL
#undef INT

const Setting& find_setting(const std::string& key) {
  const auto& table = settings();
  for (const auto& s : table)
    if (s.key == key) return s;
  const Setting* hit = nullptr;
  int hits = 0;
  for (const auto& s : table) {
    const auto dot = s.key.rfind('.');
    if (s.key.substr(dot + 1) == key) {
      hit = &s;
      ++hits;
    }
  }
  if (hits == 1) return *hit;
  throw ScenarioError(key, hits ? "ambiguous key" : "unknown key");
}

// Names the key the user wrote when the range check fails.
void check_setting(const Scenario& sc, const std::string& key) {
  try {
    sc.validate();
  } catch (const ScenarioError& e) {
    if (key == "csi.delta" && e.key().rfind("csi.delta", 0) == 0) throw ScenarioError(key, "must lie in [0, 1)");
    if (key == "fbr.tau" && e.key().rfind("fbr.tau", 0) == 0) throw ScenarioError(key, "must lie in (0, 0.5)");
    if (key == "power.P_dbm" && e.key() == "power.P") throw ScenarioError(key, "must be finite");
    if (e.key() == key || e.key().rfind(key + "_", 0) == 0) throw;
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v[i]);
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& t : split(s, ';')) out.push_back(std::strtod(t.c_str(), nullptr));
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_list(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_double(a[i], b[i])) return false;
  return true;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

std::string record_key(const RunRecord& r) {
  return r.algorithm + "|" + r.csi + "|" + fmt(r.axis_value) + "|" + std::to_string(r.seed);
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& s : settings()) keys.push_back(s.key);
  return keys;
}

void apply_setting(Scenario& sc, const std::string& key, const std::string& value) {
  const Setting& s = find_setting(trim(key));
  s.set(sc, value);
  check_setting(sc, s.key);
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError("line " + std::to_string(lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError("line " + std::to_string(lineno), "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    apply_setting(sc, key, line.substr(eq + 1));
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read scenario " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

std::string format_scenario(const Scenario& sc) {
  std::string out;
  for (const auto& s : settings())
    if (s.get) out += s.key + " = " + s.get(sc) + "\n";
  return out;
}

std::string scenario_hash(const Scenario& sc) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(format_scenario(sc))));
  return buf;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::K: return "K";
    case SweepAxis::TT: return "t_t";
    case SweepAxis::M: return "M";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::None, SweepAxis::Delta, SweepAxis::K, SweepAxis::TT, SweepAxis::M})
    if (s == to_string(a)) return a;
  throw ScenarioError("sweep", "unknown axis '" + s + "' (expected delta, K, t_t, M or none)");
}

void apply_axis(Scenario& sc, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::None: break;
    case SweepAxis::Delta: sc.delta_k = sc.delta_e = v; break;
    case SweepAxis::K: sc.K = int(v); break;
    case SweepAxis::TT: sc.t_t = v; break;
    case SweepAxis::M: sc.M = int(v); break;
  }
}

std::string AlgoSpec::name() const {
  return std::string(objective == Objective::MaxMin ? "maxmin" : "ssr") + (fbr ? "-fbr" : "-lbr");
}

AlgoSpec parse_algo(const std::string& s) {
  for (Objective o : {Objective::MaxMin, Objective::Sum})
    for (bool fbr : {true, false}) {
      AlgoSpec a{o, fbr};
      if (a.name() == s) return a;
    }
  throw ScenarioError("algos", "unknown algorithm '" + s + "'");
}

void ExperimentSpec::validate() const {
  base.validate();
  if (seeds < 1) throw ScenarioError("seeds", "must be >= 1");
  if (algorithms.empty()) throw ScenarioError("algos", "at least one algorithm is required");
  if (axis == SweepAxis::None && values.size() > 1) throw ScenarioError("sweep", "values given without an axis");
  if (axis != SweepAxis::None && values.empty()) throw ScenarioError("sweep", "axis given without values");
  for (double v : values) {
    Scenario sc = base;
    const bool integral = axis == SweepAxis::K || axis == SweepAxis::M;
    if (integral && v != std::floor(v)) throw ScenarioError("sweep", std::string(to_string(axis)) + " must be integral");
    apply_axis(sc, axis, v);
    try {
      sc.validate();
    } catch (const ScenarioError& e) {
      throw ScenarioError("sweep", std::string(to_string(axis)) + "=" + fmt(v) + ": " + e.what());
    }
  }
}

bool same_record(const RunRecord& a, const RunRecord& b) {
  return a.scenario_hash == b.scenario_hash && a.seed == b.seed && a.algorithm == b.algorithm && a.csi == b.csi &&
         a.axis == b.axis && same_double(a.axis_value, b.axis_value) && same_double(a.min_sr, b.min_sr) &&
         same_list(a.user_sr, b.user_sr) && same_double(a.ssr, b.ssr) && same_double(a.jain, b.jain) &&
         same_double(a.certified, b.certified) && same_list(a.certified_users, b.certified_users) &&
         a.iterations == b.iterations && a.status == b.status && a.diagnostic == b.diagnostic;
}

std::uint64_t run_seed(const Scenario& base, int seed_index) { return derive_seed(base.seed, std::uint64_t(seed_index)); }

Scenario scenario_at(const ExperimentSpec& spec, double axis_value) {
  Scenario sc = spec.base;
  apply_axis(sc, spec.axis, axis_value);
  return sc;
}

RunRecord run_single(const Scenario& sc, const AlgoSpec& algo, bool robust, int seed_index, std::uint64_t seed,
                     InitMode init, const std::string& axis, double axis_value) {
  RunRecord rec;
  rec.scenario_hash = scenario_hash(sc);
  rec.seed = seed_index;
  rec.algorithm = algo.name();
  rec.csi = robust ? "robust" : "perfect";
  rec.axis = axis;
  rec.axis_value = axis_value;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Rng rng(seed, 0);
    const ChannelSet ch = generate_channels(sc, rng);
    const Link link = make_link(ch, sc.noise_power(), sc.P);
    RunConfig cfg;
    cfg.fbr = algo.fbr;
    cfg.objective = algo.objective;
    cfg.robust = robust;
    cfg.init = init;
    cfg.seed = seed;
    cfg.params = AlgoParams::from(sc);
    const RunResult r = run_algorithm(link, sc, cfg);
    const auto& sr = r.report.secrecy(algo.fbr);
    for (double v : sr) rec.user_sr.push_back(nats_to_bits(v));
    rec.min_sr = nats_to_bits(r.report.min_sr(algo.fbr));
    rec.ssr = nats_to_bits(r.report.ssr(algo.fbr));
    rec.jain = r.report.jain(algo.fbr);
    if (robust) {
      rec.certified = nats_to_bits(r.certified);
      for (double v : r.certified_users) rec.certified_users.push_back(nats_to_bits(v));
    }
    rec.iterations = r.trace.iterations;
    rec.status = to_string(r.trace.status);
    rec.diagnostic = sanitize(r.trace.diagnostic);
    rec.design = r.state;
    for (double v : r.trace.objective_series()) rec.objective_series.push_back(nats_to_bits(v));
  } catch (const std::exception& e) {
    rec.status = "Error";
    rec.diagnostic = sanitize(e.what());
    rec.min_sr = rec.ssr = 0;
    rec.jain = std::nan("");
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

void sort_records(std::vector<RunRecord>& records) {
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    if (a.csi != b.csi) return a.csi < b.csi;
    return a.seed < b.seed;
  });
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  struct Task {
    double value;
    AlgoSpec algo;
    int seed;
  };
  std::vector<Task> tasks;
  const std::vector<double> values = spec.values.empty() ? std::vector<double>{0.0} : spec.values;
  for (double v : values)
    for (const auto& a : spec.algorithms)
      for (int s = 0; s < spec.seeds; ++s) tasks.push_back({v, a, s});

  std::vector<RunRecord> records(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex report_mu;
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      const Scenario sc = scenario_at(spec, t.value);
      records[i] = run_single(sc, t.algo, spec.robust, t.seed, run_seed(spec.base, t.seed), spec.init,
                              to_string(spec.axis), t.value);
      if (progress) {
        std::lock_guard<std::mutex> lock(report_mu);
        progress(records[i]);
      }
    }
  };
  unsigned n = spec.threads > 0 ? unsigned(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, unsigned(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  sort_records(records);
  return records;
}

ValidationResult validate_robustness(const RunRecord& record, const Scenario& sc, int samples, double tol_nats) {
  ValidationResult out;
  if (record.csi != "robust") throw std::invalid_argument("validate_robustness: not a robust run");
  if (scenario_hash(sc) != record.scenario_hash)
    throw std::invalid_argument("validate_robustness: scenario does not match the record");
  if (record.design.W.empty()) throw std::invalid_argument("validate_robustness: record has no design");
  const AlgoSpec algo = parse_algo(record.algorithm);
  Rng rng(run_seed(sc, record.seed), 0);
  const ChannelSet ch = generate_channels(sc, rng);
  const Link link = make_link(ch, sc.noise_power(), sc.P);
  const auto [xi_k, xi_e] = xi_pair(sc, algo.fbr);
  const SoundnessReport rep =
      sample_worst_rates(link, record.design, xi_k, xi_e, samples, run_seed(sc, record.seed) ^ 0x76616c6964ull);
  const int K = int(rep.worst.size());
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const double bound = k < int(record.certified_users.size()) ? record.certified_users[k] : record.certified;
    const double margin = rep.worst[k] - bits_to_nats(bound);
    if (algo.objective == Objective::MaxMin) {
      // The max-min certificate bounds every user by the common value.
      const double common = rep.worst[k] - bits_to_nats(record.certified);
      if (common < -tol_nats && out.pass) {
        out.pass = false;
        out.violating_user = k;
        out.violating_sample = rep.worst_sample[k];
      }
    }
    if (margin < -tol_nats && out.pass) {
      out.pass = false;
      out.violating_user = k;
      out.violating_sample = rep.worst_sample[k];
    }
    out.worst_margin = std::min(out.worst_margin, nats_to_bits(margin));
  }
  if (!out.pass) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "user %d falls below its certificate at sample %d (margin %.3e bps/Hz)",
                  out.violating_user, out.violating_sample, out.worst_margin);
    out.message = buf;
  }
  return out;
}

std::string csv_header() {
  return "scenario_hash,seed,algorithm,csi,axis,axis_value,min_sr_bps,ssr_bps,jain,certified_bps,iterations,status,"
         "user_sr_bps,certified_user_bps,diagnostic";
}

void emit_csv(const std::vector<RunRecord>& records, const fs::path& path) {
  {
    std::ofstream os = open_out(path);
    os << csv_header() << "\n";
    for (const auto& r : records)
      os << r.scenario_hash << "," << r.seed << "," << r.algorithm << "," << r.csi << "," << r.axis << ","
         << fmt(r.axis_value) << "," << fmt(r.min_sr) << "," << fmt(r.ssr) << "," << fmt(r.jain) << ","
         << fmt(r.certified) << "," << r.iterations << "," << r.status << "," << join(r.user_sr) << ","
         << join(r.certified_users) << "," << sanitize(r.diagnostic) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path.string());
  }
  fs::path timing = path;
  timing.replace_extension(".timing.csv");
  std::ofstream ts = open_out(timing);
  ts << "row,wall_seconds\n";
  for (size_t i = 0; i < records.size(); ++i) ts << i << "," << fmt(records[i].wall_seconds) << "\n";
}

std::vector<RunRecord> parse_csv(const fs::path& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != csv_header())
    throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 15) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 15 fields");
    RunRecord r;
    r.scenario_hash = f[0];
    r.seed = std::stoi(f[1]);
    r.algorithm = f[2];
    r.csi = f[3];
    r.axis = f[4];
    r.axis_value = std::strtod(f[5].c_str(), nullptr);
    r.min_sr = std::strtod(f[6].c_str(), nullptr);
    r.ssr = std::strtod(f[7].c_str(), nullptr);
    r.jain = std::strtod(f[8].c_str(), nullptr);
    r.certified = std::strtod(f[9].c_str(), nullptr);
    r.iterations = std::stoi(f[10]);
    r.status = f[11];
    r.user_sr = parse_list(f[12]);
    r.certified_users = parse_list(f[13]);
    r.diagnostic = f[14];
    out.push_back(std::move(r));
  }
  fs::path timing = path;
  timing.replace_extension(".timing.csv");
  if (fs::exists(timing)) {
    std::ifstream ts = open_in(timing);
    std::getline(ts, line);
    while (std::getline(ts, line)) {
      const auto f = split(line, ',');
      if (f.size() != 2) continue;
      const size_t i = std::stoul(f[0]);
      if (i < out.size()) out[i].wall_seconds = std::strtod(f[1].c_str(), nullptr);
    }
  }
  return out;
}

void emit_traces(const std::vector<RunRecord>& records, const fs::path& path) {
  std::ofstream os = open_out(path);
  os << "algorithm,csi,axis_value,seed,iteration,objective_bps\n";
  for (const auto& r : records)
    for (size_t i = 0; i < r.objective_series.size(); ++i)
      os << r.algorithm << "," << r.csi << "," << fmt(r.axis_value) << "," << r.seed << "," << i << ","
         << fmt(r.objective_series[i]) << "\n";
}

void load_traces(std::vector<RunRecord>& records, const fs::path& path) {
  std::ifstream is = open_in(path);
  std::map<std::string, RunRecord*> index;
  for (auto& r : records) {
    r.objective_series.clear();
    index[record_key(r)] = &r;
  }
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    const auto f = split(line, ',');
    if (f.size() != 6) continue;
    RunRecord probe;
    probe.algorithm = f[0];
    probe.csi = f[1];
    probe.axis_value = std::strtod(f[2].c_str(), nullptr);
    probe.seed = std::stoi(f[3]);
    auto it = index.find(record_key(probe));
    if (it != index.end()) it->second->objective_series.push_back(std::strtod(f[5].c_str(), nullptr));
  }
}

void emit_designs(const std::vector<RunRecord>& records, const fs::path& path) {
  json arr = json::array();
  for (const auto& r : records) {
    json d;
    d["key"] = record_key(r);
    d["theta"] = std::vector<double>(r.design.theta.data(), r.design.theta.data() + r.design.theta.size());
    json beams = json::array();
    for (const auto& w : r.design.W) {
      std::vector<double> flat;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        flat.push_back(w(i).real());
        flat.push_back(w(i).imag());
      }
      beams.push_back(flat);
    }
    d["W"] = beams;
    arr.push_back(d);
  }
  std::ofstream os = open_out(path);
  os << arr.dump(1) << "\n";
}

void load_designs(std::vector<RunRecord>& records, const fs::path& path) {
  std::ifstream is = open_in(path);
  const json arr = json::parse(is);
  std::map<std::string, const json*> index;
  for (const auto& d : arr) index[d.at("key").get<std::string>()] = &d;
  for (auto& r : records) {
    auto it = index.find(record_key(r));
    if (it == index.end()) continue;
    const json& d = *it->second;
    const auto theta = d.at("theta").get<std::vector<double>>();
    r.design.theta = Eigen::Map<const RVec>(theta.data(), Eigen::Index(theta.size()));
    r.design.W.clear();
    for (const auto& b : d.at("W")) {
      const auto flat = b.get<std::vector<double>>();
      CVec w(Eigen::Index(flat.size() / 2));
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = cd(flat[2 * i], flat[2 * i + 1]);
      r.design.W.push_back(w);
    }
  }
}

void write_experiment(const ExperimentSpec& spec, const std::vector<RunRecord>& records) {
  fs::create_directories(spec.out);
  {
    std::ofstream os = open_out(spec.out / "scenario.txt");
    os << format_scenario(spec.base);
  }
  json meta;
  meta["axis"] = to_string(spec.axis);
  meta["values"] = spec.values;
  std::vector<std::string> algos;
  for (const auto& a : spec.algorithms) algos.push_back(a.name());
  meta["algorithms"] = algos;
  meta["csi"] = spec.robust ? "robust" : "perfect";
  meta["seeds"] = spec.seeds;
  meta["init"] = spec.init == InitMode::LbrWarm ? "lbr-warm" : "random";
  {
    std::ofstream os = open_out(spec.out / "experiment.json");
    os << meta.dump(1) << "\n";
  }
  emit_csv(records, spec.out / "records.csv");
  emit_traces(records, spec.out / "traces.csv");
  emit_designs(records, spec.out / "designs.json");
}

const char* to_string(Figure f) {
  switch (f) {
    case Figure::Convergence: return "convergence";
    case Figure::SrDist: return "sr-dist";
    case Figure::JainVsDelta: return "jain-vs-delta";
    case Figure::MinSrVsDelta: return "minsr-vs-delta";
    case Figure::MinSrVsK: return "minsr-vs-K";
    case Figure::MinSrVsTt: return "minsr-vs-tt";
  }
  return "?";
}

Figure parse_figure(const std::string& s) {
  for (Figure f : {Figure::Convergence, Figure::SrDist, Figure::JainVsDelta, Figure::MinSrVsDelta, Figure::MinSrVsK,
                   Figure::MinSrVsTt})
    if (s == to_string(f)) return f;
  throw std::invalid_argument("unknown figure '" + s + "'");
}

FigureData figure_data(const std::vector<RunRecord>& records, Figure fig) {
  if (records.empty()) throw std::invalid_argument("no records to plot");
  std::vector<std::string> names;
  for (const auto& r : records) {
    const std::string n = r.algorithm + " (" + r.csi + ")";
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  auto series_of = [](const RunRecord& r) { return r.algorithm + " (" + r.csi + ")"; };
  FigureData out;
  out.ylabel = "min secrecy rate (bps/Hz)";

  if (fig == Figure::Convergence) {
    out.title = "Convergence";
    out.xlabel = "iteration";
    out.ylabel = "objective (bps/Hz)";
    for (const auto& n : names) {
      std::vector<const RunRecord*> rs;
      size_t len = 0;
      for (const auto& r : records)
        if (series_of(r) == n && !r.objective_series.empty()) {
          rs.push_back(&r);
          len = std::max(len, r.objective_series.size());
        }
      if (rs.empty()) continue;
      Series s{n, {}, {}};
      for (size_t i = 0; i < len; ++i) {
        double sum = 0;
        for (const auto* r : rs) sum += r->objective_series[std::min(i, r->objective_series.size() - 1)];
        s.x.push_back(double(i));
        s.y.push_back(sum / double(rs.size()));
      }
      out.series.push_back(s);
    }
    if (out.series.empty()) throw std::invalid_argument("convergence figure needs traces");
    return out;
  }

  if (fig == Figure::SrDist) {
    out.title = "Per-user secrecy rate";
    out.xlabel = "user";
    out.ylabel = "mean secrecy rate (bps/Hz)";
    out.bars = true;
    const double first = records.front().axis_value;
    for (const auto& n : names) {
      std::vector<double> sum;
      int count = 0;
      for (const auto& r : records) {
        if (series_of(r) != n || r.axis_value != first || r.user_sr.empty()) continue;
        if (sum.size() < r.user_sr.size()) sum.resize(r.user_sr.size(), 0.0);
        for (size_t k = 0; k < r.user_sr.size(); ++k) sum[k] += r.user_sr[k];
        ++count;
      }
      if (!count) continue;
      Series s{n, {}, {}};
      for (size_t k = 0; k < sum.size(); ++k) {
        s.x.push_back(double(k + 1));
        s.y.push_back(sum[k] / count);
      }
      out.series.push_back(s);
    }
    return out;
  }

  std::string axis;
  switch (fig) {
    case Figure::JainVsDelta:
      axis = "delta";
      out.title = "Fairness versus CSI error";
      out.ylabel = "median Jain index";
      break;
    case Figure::MinSrVsDelta: axis = "delta"; out.title = "Min secrecy rate versus CSI error"; break;
    case Figure::MinSrVsK: axis = "K"; out.title = "Min secrecy rate versus users"; break;
    default: axis = "t_t"; out.title = "Min secrecy rate versus transmission time"; break;
  }
  out.xlabel = axis == "t_t" ? "t_t (s)" : axis;
  for (const auto& r : records)
    if (r.axis != axis) throw std::invalid_argument(std::string(to_string(fig)) + " needs a sweep over " + axis);
  for (const auto& n : names) {
    std::map<double, std::vector<double>> by_value;
    for (const auto& r : records)
      if (series_of(r) == n) by_value[r.axis_value].push_back(fig == Figure::JainVsDelta ? r.jain : r.min_sr);
    Series s{n, {}, {}};
    for (const auto& [v, ys] : by_value) {
      s.x.push_back(v);
      s.y.push_back(median(ys));
    }
    out.series.push_back(s);
  }
  return out;
}

std::string render_svg(const FigureData& fig) {
  const double W = 640, H = 420, left = 70, right = 180, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  double x0 = 1e300, x1 = -1e300, y0 = 0, y1 = -1e300;
  for (const auto& s : fig.series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      if (std::isfinite(s.y[i])) {
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
  if (x0 > x1) x0 = 0, x1 = 1;
  if (fig.bars) x0 -= 0.5, x1 += 0.5;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 <= y0) y1 = y0 + 1;
  y1 += 0.05 * (y1 - y0);
  auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto Y = [&](double y) { return top + (1 - (y - y0) / (y1 - y0)) * ph; };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << fig.title
     << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  os << buf;
  for (int t = 0; t <= 5; ++t) {
    const double yv = y0 + (y1 - y0) * t / 5.0, xv = x0 + (x1 - x0) * t / 5.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                  left, Y(yv), left + pw, Y(yv), left - 6, Y(yv) + 4, yv);
    os << buf;
    if (!fig.bars) {
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", X(xv),
                    top + ph + 18, xv);
      os << buf;
    }
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">", left + pw / 2, H - 12);
  os << buf << fig.xlabel << "</text>\n";
  std::snprintf(buf, sizeof buf, "<text transform=\"translate(16,%.1f) rotate(-90)\" text-anchor=\"middle\">",
                top + ph / 2);
  os << buf << fig.ylabel << "</text>\n";

  const size_t ns = fig.series.size();
  for (size_t si = 0; si < ns; ++si) {
    const Series& s = fig.series[si];
    const char* color = palette[si % 8];
    if (fig.bars) {
      const double slot = pw / (x1 - x0) * 0.8, bw = slot / double(std::max<size_t>(ns, 1));
      for (size_t i = 0; i < s.x.size(); ++i) {
        const double bx = X(s.x[i]) - slot / 2 + bw * double(si);
        const double yv = std::isfinite(s.y[i]) ? s.y[i] : 0.0;
        std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n", bx,
                      std::min(Y(yv), Y(0)), bw, std::abs(Y(0) - Y(yv)), color);
        os << buf;
        if (si == 0) {
          std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n", X(s.x[i]),
                        top + ph + 18, s.x[i]);
          os << buf;
        }
      }
    } else {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(s.x[i]), Y(s.y[i]));
        pts += buf;
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", X(s.x[i]), Y(s.y[i]),
                      color);
        os << buf;
      }
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    }
    const double ly = top + 14 + 18 * double(si);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">",
                  left + pw + 12, ly - 10, color, left + pw + 30, ly);
    os << buf << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const std::vector<RunRecord>& records, Figure fig, const fs::path& path) {
  const FigureData data = figure_data(records, fig);
  {
    std::ofstream os = open_out(path);
    os << render_svg(data);
    if (!os) throw std::runtime_error("write failed: " + path.string());
  }
  fs::path csv = path;
  csv.replace_extension(".csv");
  std::ofstream os = open_out(csv);
  os << "series,x,y\n";
  for (const auto& s : data.series)
    for (size_t i = 0; i < s.x.size(); ++i) os << s.name << "," << fmt(s.x[i]) << "," << fmt(s.y[i]) << "\n";
}

}  // namespace irssec
