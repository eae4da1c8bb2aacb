#pragma once

// Config-driven experiment runner.  A single JSON config names an experiment
// from the catalog, carries its parameters, a master seed and an output
// directory; run_experiment dispatches to the model modules, writes CSV/JSON
// artifacts and a manifest with SHA-256 hashes of every file written.
// Data files are deterministic functions of (config, seed); only the
// manifest's wall-clock entry varies between identical runs.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "chronolab/bosonic_ring.hpp"
#include "chronolab/disorder_lab.hpp"
#include "chronolab/time_lattice.hpp"
#include "chronolab/two_mode_dtc.hpp"

namespace chronolab::cli {

inline constexpr int schema_version = 1;
inline constexpr const char* tool_version = "chronolab 0.1.0";

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Experiment catalog and parameter schemas.

struct ParamDef {
  const char* name;
  enum Kind { number, integer, boolean } kind = number;
  bool required = false;
  double def = 0.0;  // default when optional (booleans: 0/1)
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct ExperimentDef {
  const char* name;
  std::vector<ParamDef> params;
};

inline const std::vector<ExperimentDef>& catalog() {
  using P = ParamDef;
  static const std::vector<ExperimentDef> cat = {
      {"else_dtc",
       {{"L", P::integer, true, 0, 2, 14},
        {"epsilon", P::number, true, 0, 0.0, 0.5},
        {"h", P::number, true, 0, 0.0, 100.0},
        {"realizations", P::integer, true, 0, 1, 100000},
        {"J", P::number, false, 1.0, 0.0, 100.0},
        {"hz", P::number, false, 1.0, 0.0, 100.0},
        {"t2", P::number, false, 1.0, 1e-6, 100.0},
        {"periods", P::integer, false, 200, 4, 100000},
        {"site", P::integer, false, 0, 0, 13}}},
      {"khemani_sg",
       {{"L", P::integer, true, 0, 2, 14},
        {"Jz", P::number, true, 0, 0.0, 100.0},
        {"realizations", P::integer, true, 0, 1, 100000},
        {"t1", P::number, false, 1.0, 1e-6, 100.0},
        {"t2", P::number, false, 1.0, 1e-6, 100.0},
        {"omega_points", P::integer, false, 256, 16, 100000},
        {"eta", P::number, false, 0.05, 1e-6, 10.0}}},
      {"yao_phase_diagram",
       {{"jz_min", P::number, true, 0, 0.0, 100.0},
        {"jz_max", P::number, true, 0, 0.0, 100.0},
        {"jz_steps", P::integer, true, 0, 1, 64},
        {"eps_min", P::number, true, 0, 0.0, 0.5},
        {"eps_max", P::number, true, 0, 0.0, 0.5},
        {"eps_steps", P::integer, true, 0, 1, 64},
        {"realizations", P::integer, true, 0, 1, 100000},
        {"L", P::integer, false, 8, 2, 14},
        {"alpha", P::number, false, 0.0, -1.0, 6.0},
        {"t2", P::number, false, 1.0, 1e-6, 100.0},
        {"periods", P::integer, false, 100, 4, 100000},
        {"site", P::integer, false, 0, 0, 13}}},
      {"ion_chain",
       {{"L", P::integer, true, 0, 2, 14},
        {"epsilon", P::number, false, 0.0, 0.0, 0.5},
        {"J0", P::number, false, 0.1, 0.0, 100.0},
        {"alpha", P::number, false, 1.5, 0.0, 6.0},
        {"W", P::number, false, 0.0, 0.0, 100.0},
        {"t1", P::number, false, 1.0, 1e-6, 100.0},
        {"t2", P::number, false, 1.0, 1e-6, 100.0},
        {"t3", P::number, false, 1.0, 1e-6, 100.0},
        {"realizations", P::integer, false, 1, 1, 100000},
        {"periods", P::integer, false, 100, 4, 100000},
        {"site", P::integer, false, 0, 0, 13}}},
      {"nv_ensemble",
       {{"L", P::integer, true, 0, 2, 14},
        {"realizations", P::integer, true, 0, 1, 100000},
        {"tau1", P::number, false, 1.0, 1e-6, 100.0},
        {"tau2", P::number, false, 1.0, 1e-6, 100.0},
        {"omega_x", P::number, false, 0.0, 0.0, 100.0},
        {"omega_y", P::number, false, 0.0, 0.0, 100.0},
        {"J", P::number, false, 0.1, 0.0, 100.0},
        {"delta", P::number, false, 0.0, 0.0, 100.0},
        {"min_separation", P::number, false, 0.15, 0.01, 0.5},
        {"periods", P::integer, false, 100, 4, 100000},
        {"site", P::integer, false, 0, 0, 13}}},
      {"gpe_ring",
       {{"gamma", P::number, true, 0, -10000.0, 10000.0},
        {"points", P::integer, false, 256, 16, 4096},
        {"threshold", P::boolean, false, 0},
        {"gamma_lo", P::number, false, -15.0, -10000.0, 0.0},
        {"gamma_hi", P::number, false, -5.0, -10000.0, 0.0}}},
      {"two_mode_cat",
       {{"ratio", P::number, true, 0, 0.0, 1000.0},
        {"J", P::number, false, 1.0, 1e-6, 100.0},
        {"n_min", P::integer, false, 10, 2, 2000},
        {"n_max", P::integer, false, 60, 2, 2000},
        {"n_step", P::integer, false, 10, 1, 2000},
        {"classify_n", P::integer, false, 20, 2, 2000}}},
      {"lloyd_time",
       {{"s", P::integer, true, 0, 8, 5000},
        {"gamma", P::number, true, 0, 1e-6, 100.0},
        {"J", P::number, false, 1.0, 1e-6, 100.0},
        {"realizations", P::integer, false, 20, 1, 10000},
        {"periods", P::integer, false, 0, 0, 1000000}}},
      {"ring_anderson",
       {{"k0", P::number, true, 0, 0.5, 256.0},
        {"K", P::integer, true, 0, 1, 1024},
        {"V0", P::number, true, 0, 0.0, 1e6},
        {"omega", P::number, false, 1.0, 1e-6, 1000.0},
        {"cutoff", P::integer, false, 0, 0, 8192}}},
      {"secular_bands",
       {{"V0", P::number, true, 0, 0.0, 1e6},
        {"s", P::integer, true, 0, 2, 64},
        {"mass", P::number, false, 1.0, 1e-6, 1e6},
        {"cutoff", P::integer, false, 32, 4, 512},
        {"bands", P::integer, false, 6, 1, 64}}},
      {"phase_crystal",
       {{"s", P::integer, true, 0, 2, 64},
        {"mu", P::number, true, 0, 0.0, 1e3},
        {"lambda", P::number, true, 0, 1e-9, 1.0},
        {"n_max", P::integer, false, 400, 8, 4096}}},
      {"bouncer",
       {{"lambda", P::number, true, 0, 0.0, 10.0},
        {"omega", P::number, true, 0, 1e-3, 100.0},
        {"s", P::integer, false, 2, 2, 8},
        {"basis", P::integer, false, 120, 8, 1024},
        {"steps", P::integer, false, 512, 256, 65536},
        {"grid_points", P::integer, false, 4096, 64, 65536},
        {"z_max", P::number, false, 80.0, 1.0, 10000.0}}},
      {"mott_time",
       {{"s", P::integer, true, 0, 2, 12},
        {"N", P::integer, true, 0, 1, 12},
        {"U", P::number, true, 0, 0.0, 1e6},
        {"J", P::number, false, 1.0, 0.0, 100.0}}},
  };
  return cat;
}

inline const ExperimentDef* find_experiment(const std::string& name) {
  for (const auto& e : catalog())
    if (name == e.name) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Config validation: collect every violation, path-addressed.

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output;
  json params;  // validated, defaults filled in
};

inline ExperimentConfig validate_config(const std::string& text) {
  std::vector<std::string> errs;
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
      throw config_error("missing experiment name (empty config)");
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw config_error("config root must be a JSON object");

  ExperimentConfig cfg;
  const ExperimentDef* def = nullptr;
  if (!root.contains("experiment"))
    errs.push_back("experiment: missing experiment name");
  else if (!root["experiment"].is_string())
    errs.push_back("experiment: must be a string");
  else {
    cfg.experiment = root["experiment"].get<std::string>();
    def = find_experiment(cfg.experiment);
    if (!def)
      errs.push_back("experiment: unknown experiment name '" +
                     cfg.experiment + "'");
  }
  if (!root.contains("seed"))
    errs.push_back("seed: missing (non-negative integer)");
  else if (!root["seed"].is_number_unsigned() &&
           !(root["seed"].is_number_integer() &&
             root["seed"].get<std::int64_t>() >= 0))
    errs.push_back("seed: must be a non-negative integer");
  else
    cfg.seed = root["seed"].get<std::uint64_t>();
  if (!root.contains("output"))
    errs.push_back("output: missing (directory path)");
  else if (!root["output"].is_string() ||
           root["output"].get<std::string>().empty())
    errs.push_back("output: must be a non-empty string");
  else
    cfg.output = root["output"].get<std::string>();

  json params = json::object();
  if (!root.contains("params"))
    errs.push_back("params: missing (object)");
  else if (!root["params"].is_object())
    errs.push_back("params: must be an object");
  else
    params = root["params"];

  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& k = it.key();
    if (k != "experiment" && k != "seed" && k != "output" && k != "params")
      errs.push_back(k + ": unknown top-level key");
  }

  if (def) {
    for (const ParamDef& p : def->params) {
      std::string path = std::string("params.") + p.name;
      if (!params.contains(p.name)) {
        if (p.required)
          errs.push_back(path + ": required parameter missing");
        else
          cfg.params[p.name] =
              p.kind == ParamDef::integer ? json(static_cast<long>(p.def))
              : p.kind == ParamDef::boolean ? json(p.def != 0.0)
                                            : json(p.def);
        continue;
      }
      const json& v = params[p.name];
      switch (p.kind) {
        case ParamDef::integer:
          if (!v.is_number_integer()) {
            errs.push_back(path + ": must be an integer");
            continue;
          }
          break;
        case ParamDef::number:
          if (!v.is_number()) {
            errs.push_back(path + ": must be a number");
            continue;
          }
          break;
        case ParamDef::boolean:
          if (!v.is_boolean()) {
            errs.push_back(path + ": must be a boolean");
            continue;
          }
          break;
      }
      if (p.kind != ParamDef::boolean) {
        double x = v.get<double>();
        if (x < p.lo || x > p.hi) {
          std::ostringstream ss;
          ss << path << ": value " << x << " outside range [" << p.lo << ", "
             << p.hi << "]";
          errs.push_back(ss.str());
          continue;
        }
      }
      cfg.params[p.name] = v;
    }
    for (auto it = params.begin(); it != params.end(); ++it) {
      bool known = false;
      for (const ParamDef& p : def->params)
        if (it.key() == p.name) known = true;
      if (!known)
        errs.push_back("params." + it.key() + ": unknown parameter");
    }
  }

  if (!errs.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < errs.size(); ++i)
      msg += (i ? "\n" : "") + errs[i];
    throw config_error(msg);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Artifact bookkeeping.

inline std::string sha256_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw io_error("cannot open for hashing: " + p.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw io_error("sha256 init failed");
  }
  char buf[1 << 15];
  while (f.read(buf, sizeof buf), f.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  EVP_DigestFinal_ex(ctx, md, &n);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < n; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct RunManifest {
  json config;  // echo of the validated config
  std::vector<std::pair<std::string, std::string>> artifacts;  // path, sha256
  double wall_seconds = 0.0;
};

namespace detail {

struct Sink {
  std::filesystem::path dir;
  std::vector<std::string> files;
  void text(const std::string& name, const std::string& body) {
    lab::write_text_file((dir / name).string(), body);
    files.push_back(name);
  }
  void js(const std::string& name, const json& j) {
    text(name, j.dump(2) + "\n");
  }
};

inline double num(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<double>();
}
inline long inum(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<long>();
}
inline bool flag(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<bool>();
}

inline json record_summary(const lab::RunRecord& r) {
  json j;
  j["n_requested"] = r.n_requested;
  j["n_ok"] = r.n_ok;
  return j;
}

inline json subharmonic_json(const observables::SubharmonicReport& rep) {
  json j;
  j["peak_center"] = rep.peak_center;
  j["peak_height"] = rep.peak_height;
  j["peak_variance"] = rep.peak_variance;
  j["locked"] = rep.locked;
  return j;
}

// trace.csv + spectrum.csv + record.json + report.json for any spin ensemble
inline void spin_trace_artifacts(const lab::ModelSpec& m,
                                 const lab::EnsembleOptions& o, int periods,
                                 int site, Sink& out) {
  auto rec = lab::ensemble_trace(m, o, periods, site);
  if (rec.n_ok == 0)
    throw convergence_error("ensemble: every realization failed: " +
                            (rec.errors.empty() ? std::string("?")
                                                : rec.errors.front()));
  auto ts = lab::averaged_trace(rec);
  auto spec = observables::dft_series(ts);
  lab::export_csv(ts, (out.dir / "trace.csv").string());
  out.files.push_back("trace.csv");
  lab::export_csv(spec, (out.dir / "spectrum.csv").string());
  out.files.push_back("spectrum.csv");
  rec.wall_seconds = 0.0;  // wall clock lives in the manifest only
  lab::persist(rec, (out.dir / "record.json").string());
  out.files.push_back("record.json");
  json rep = record_summary(rec);
  rep["subharmonic"] = subharmonic_json(lab::subharmonic_of(rec));
  out.js("report.json", rep);
}

// ---------------------------------------------------------------------------
// Per-experiment runners.

inline void run_else(const ExperimentConfig& c, const lab::EnsembleOptions& o,
                     Sink& out) {
  spins::ElseSpec s;
  s.L = static_cast<int>(inum(c, "L"));
  s.epsilon = num(c, "epsilon");
  s.hx = num(c, "h");
  s.J = num(c, "J");
  s.hz = num(c, "hz");
  s.t2 = num(c, "t2");
  spin_trace_artifacts(lab::ModelSpec(s), o,
                       static_cast<int>(inum(c, "periods")),
                       static_cast<int>(inum(c, "site")), out);
}

inline void run_ion(const ExperimentConfig& c, const lab::EnsembleOptions& o,
                    Sink& out) {
  spins::IonSpec s;
  s.L = static_cast<int>(inum(c, "L"));
  s.epsilon = num(c, "epsilon");
  s.J0 = num(c, "J0");
  s.alpha_pow = num(c, "alpha");
  s.W = num(c, "W");
  s.t1 = num(c, "t1");
  s.t2 = num(c, "t2");
  s.t3 = num(c, "t3");
  spin_trace_artifacts(lab::ModelSpec(s), o,
                       static_cast<int>(inum(c, "periods")),
                       static_cast<int>(inum(c, "site")), out);
}

inline void run_nv(const ExperimentConfig& c, const lab::EnsembleOptions& o,
                   Sink& out) {
  spins::NVSpec s;
  s.L = static_cast<int>(inum(c, "L"));
  s.tau1 = num(c, "tau1");
  s.tau2 = num(c, "tau2");
  s.omega_x = num(c, "omega_x");
  s.omega_y = num(c, "omega_y");
  s.J = num(c, "J");
  s.range_delta = {0.0, num(c, "delta")};
  s.min_separation = num(c, "min_separation");
  spin_trace_artifacts(lab::ModelSpec(s), o,
                       static_cast<int>(inum(c, "periods")),
                       static_cast<int>(inum(c, "site")), out);
}

// Disorder-averaged sigma^z spectral function on the quasi-energy zone.
inline void run_khemani(const ExperimentConfig& c,
                        const lab::EnsembleOptions& o, Sink& out) {
  spins::KhemaniSpec s;
  s.L = static_cast<int>(inum(c, "L"));
  s.Jz = num(c, "Jz");
  s.t1 = num(c, "t1");
  s.t2 = num(c, "t2");
  int nw = static_cast<int>(inum(c, "omega_points"));
  double eta = num(c, "eta");
  auto grid = observables::omega_grid(s.t1 + s.t2, nw);
  // spectral function of the site-0 raising operator: the pi-spin-glass
  // pairing line sits at -pi/T
  cxmat op = 0.5 * (pauli_site(s.L, 0, 'x').matrix() +
                    cx(0.0, 1.0) * pauli_site(s.L, 0, 'y').matrix());
  auto rec = lab::run_ensemble(o, [&](std::uint64_t seed) {
    auto u = lab::build_floquet(lab::ModelSpec(s), seed);
    auto q = eig_unitary(u, s.t1 + s.t2);
    return observables::spectral_function(q, op, eta, grid);
  });
  if (rec.n_ok == 0)
    throw convergence_error("khemani_sg: every realization failed");
  std::ostringstream ss;
  ss << "omega,value\n";
  ss.precision(17);
  for (std::size_t k = 0; k < grid.size(); ++k)
    ss << grid[k] << "," << rec.mean[k] << "\n";
  out.text("spectral_function.csv", ss.str());
  rec.wall_seconds = 0.0;  // wall clock lives in the manifest only
  lab::persist(rec, (out.dir / "record.json").string());
  out.files.push_back("record.json");
  std::size_t kmax = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (rec.mean[k] > rec.mean[kmax]) kmax = k;
  json rep = record_summary(rec);
  rep["peak_omega"] = grid[kmax];
  rep["peak_value"] = rec.mean[kmax];
  rep["grid_spacing"] = grid[1] - grid[0];
  out.js("report.json", rep);
}

inline void run_yao_scan(const ExperimentConfig& c,
                         const lab::EnsembleOptions& o, Sink& out) {
  long nj = inum(c, "jz_steps"), ne = inum(c, "eps_steps");
  double j0 = num(c, "jz_min"), j1 = num(c, "jz_max");
  double e0 = num(c, "eps_min"), e1 = num(c, "eps_max");
  if (j1 < j0 || e1 < e0)
    throw config_error("yao_phase_diagram: axis max below min");
  lab::ScanGrid g;
  for (long i = 0; i < nj; ++i)
    g.Jz.push_back(nj > 1 ? j0 + (j1 - j0) * i / (nj - 1) : j0);
  for (long i = 0; i < ne; ++i)
    g.eps.push_back(ne > 1 ? e0 + (e1 - e0) * i / (ne - 1) : e0);
  g.base.L = static_cast<int>(inum(c, "L"));
  g.base.alpha_pow = num(c, "alpha");
  g.base.t2 = num(c, "t2");
  g.opts = o;
  g.n_periods = static_cast<int>(inum(c, "periods"));
  g.site = static_cast<int>(inum(c, "site"));
  auto cells = lab::scan_phase_diagram(g);
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      const auto& cell = cells[i][j];
      json cj;
      cj["Jz"] = cell.Jz;
      cj["eps"] = cell.eps;
      cj["n_ok"] = cell.n_ok;
      cj["subharmonic"] = subharmonic_json(cell.report);
      out.js("cell_" + std::to_string(i) + "_" + std::to_string(j) + ".json",
             cj);
    }
  // aggregate matrix of peak heights, Jz rows x eps columns
  std::ostringstream ss;
  ss << "jz\\eps";
  ss.precision(17);
  for (double e : g.eps) ss << "," << e;
  ss << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ss << g.Jz[i];
    for (std::size_t j = 0; j < cells[i].size(); ++j)
      ss << "," << cells[i][j].report.peak_height;
    ss << "\n";
  }
  out.text("matrix.csv", ss.str());
}

inline void run_gpe(const ExperimentConfig& c, Sink& out) {
  ring::RingGrid g;
  g.M = static_cast<int>(inum(c, "points"));
  if (flag(c, "threshold")) {
    double thr = ring::find_threshold(g, num(c, "gamma_lo"),
                                      num(c, "gamma_hi"));
    json j;
    j["gamma_threshold"] = thr;
    j["points"] = g.M;
    out.js("threshold.json", j);
    return;
  }
  ring::GPEParams p;
  p.gamma = num(c, "gamma");
  p.noise_seed = c.seed;
  auto st = ring::gpe_ground_state(p, g);
  out.text("state.csv", ring::state_csv(st));
  json j;
  j["gamma"] = p.gamma;
  j["mu"] = st.mu;
  j["energy"] = st.energy;
  j["residual"] = st.residual;
  j["contrast"] = ring::density_contrast(st);
  out.js("summary.json", j);
}

inline void run_two_mode(const ExperimentConfig& c, Sink& out) {
  double ratio = num(c, "ratio"), J = num(c, "J");
  long lo = inum(c, "n_min"), hi = inum(c, "n_max"), st = inum(c, "n_step");
  if (hi < lo) throw config_error("two_mode_cat: n_max below n_min");
  std::vector<long> ns;
  for (long n = lo; n <= hi; n += st) ns.push_back(n);
  auto sc = twomode::gap_scaling(ratio, J, ns);
  out.text("gap.csv", twomode::gap_csv(sc));
  twomode::TwoModeParams p;
  p.J = J;
  p.N = inum(c, "classify_n");
  p.U = -ratio * J / static_cast<double>(p.N);
  auto rep = twomode::classify_ground(p);
  json j;
  j["alpha"] = sc.alpha;
  j["r2"] = sc.r2;
  j["excluded_N"] = sc.excluded;
  j["ground_kind"] =
      rep.kind == twomode::GroundKind::cat ? "cat" : "condensate";
  j["marginal"] = rep.marginal;
  j["number_variance"] = rep.number_variance;
  j["edge_weight"] = rep.edge_weight;
  j["gap"] = rep.gap;
  out.js("ground.json", j);
}

inline void run_lloyd(const ExperimentConfig& c, Sink& out) {
  long s = inum(c, "s"), n = inum(c, "realizations");
  double J = num(c, "J"), gamma = num(c, "gamma");
  std::ostringstream ss;
  ss << "realization,seed,l,l_tm,l_t,participation,n_accepted\n";
  ss.precision(17);
  for (long r = 0; r < n; ++r) {
    std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
    auto rep = timelattice::lloyd_localization(s, J, gamma, seed);
    ss << r << "," << seed << "," << rep.l << "," << rep.l_tm << ","
       << rep.l_t << "," << rep.participation << "," << rep.n_accepted
       << "\n";
    if (r == 0) {
      // lab-frame detection profile of the most localized accepted state
      std::size_t best = 0;
      double best_r2 = -1;
      for (std::size_t k = 0; k < rep.accepted.size(); ++k)
        if (rep.accepted[k] && rep.fit_r2[k] > best_r2) {
          best_r2 = rep.fit_r2[k];
          best = k;
        }
      auto h = timelattice::build_ring(
          [&] {
            timelattice::TightBindingRing ring =
                timelattice::uniform_ring(s, J);
            for (long i = 0; i < s; ++i)
              ring.eps[static_cast<std::size_t>(i)] =
                  keyed_lorentzian(seed, timelattice::STREAM_LLOYD_EPS,
                                   static_cast<std::uint64_t>(i), gamma);
            return ring;
          }());
      auto eig = eig_hermitian(h);
      std::vector<double> prob(static_cast<std::size_t>(s));
      for (long i = 0; i < s; ++i)
        prob[static_cast<std::size_t>(i)] =
            std::norm(eig.vectors(i, static_cast<long>(best)));
      long periods = inum(c, "periods");
      if (periods == 0) periods = 3 * s;
      lab::export_csv(timelattice::lloyd_time_profile(prob, 1.0, periods),
                      (out.dir / "profile.csv").string());
      out.files.push_back("profile.csv");
    }
  }
  out.text("lengths.csv", ss.str());
}

inline void run_ring_anderson(const ExperimentConfig& c, Sink& out) {
  timelattice::DisorderedRingSpec spec;
  spec.k0 = num(c, "k0");
  spec.K = inum(c, "K");
  spec.V0 = num(c, "V0");
  spec.omega = num(c, "omega");
  spec.seed = c.seed;
  auto rep = timelattice::ring_anderson(spec, inum(c, "cutoff"));
  std::ostringstream ss;
  ss << "index,energy,length,fit_r2\n";
  ss.precision(17);
  for (std::size_t k = 0; k < rep.energy.size(); ++k)
    ss << k << "," << rep.energy[k] << "," << rep.length[k] << ","
       << rep.fit_r2[k] << "\n";
  out.text("states.csv", ss.str());
  lab::export_csv(rep.lab_profile, (out.dir / "profile.csv").string());
  out.files.push_back("profile.csv");
  auto pot = timelattice::effective_potential(spec);
  json j;
  j["u_std"] = rep.u_std;
  j["localized_fraction"] = rep.localized_fraction;
  j["localized_fraction_stretch"] = rep.localized_fraction_stretch;
  j["corr_length"] = pot.corr_length;
  j["truncation_warning"] = pot.truncation_warning;
  out.js("summary.json", j);
}

inline void run_secular_bands(const ExperimentConfig& c, Sink& out) {
  timelattice::PendulumSpec spec;
  spec.mass = num(c, "mass");
  spec.V0 = num(c, "V0");
  spec.s = inum(c, "s");
  spec.cutoff = inum(c, "cutoff");
  auto b = timelattice::secular_bands(spec, inum(c, "bands"));
  out.text("bands.csv", timelattice::band_csv(b));
  json j;
  j["first_gap"] = b.first_gap;
  j["n_bands"] = b.bands.size();
  out.js("summary.json", j);
}

inline void run_phase_crystal(const ExperimentConfig& c, Sink& out) {
  timelattice::PhaseCrystalSpec spec;
  spec.s = inum(c, "s");
  spec.mu = num(c, "mu");
  spec.lambda = num(c, "lambda");
  spec.n_max = inum(c, "n_max");
  auto rep = timelattice::rwa_phase_crystal(spec);
  std::ostringstream ss;
  ss << "sector,level,value\n";
  ss.precision(17);
  for (std::size_t m = 0; m < rep.sector_values.size(); ++m)
    for (std::size_t k = 0; k < rep.sector_values[m].size(); ++k)
      ss << m << "," << k << "," << rep.sector_values[m][k] << "\n";
  out.text("sectors.csv", ss.str());
  json j;
  j["lowest_band"] = rep.lowest_band;
  j["bandwidth"] = rep.bandwidth;
  j["gap_above"] = rep.gap_above;
  out.js("band.json", j);
}

inline void run_bouncer(const ExperimentConfig& c, Sink& out) {
  timelattice::BouncerSpec spec;
  spec.lambda_drive = num(c, "lambda");
  spec.omega = num(c, "omega");
  spec.s = inum(c, "s");
  spec.basis = inum(c, "basis");
  spec.steps = inum(c, "steps");
  spec.grid_points = inum(c, "grid_points");
  spec.z_max = num(c, "z_max");
  auto rep = timelattice::bouncer_floquet(spec);
  json j;
  j["n_res"] = rep.n_res;
  j["e_res"] = rep.e_res;
  j["splitting"] = rep.splitting;
  j["omega"] = spec.omega;
  j["unitarity"] = rep.unitarity;
  std::vector<double> qe;
  for (long k : rep.resonant) qe.push_back(rep.quasi.quasi[k]);
  j["resonant_quasi"] = qe;
  cxvec p2t = rep.monodromy.matrix() * rep.packet2;
  j["exchange_overlap"] = std::abs(rep.packet1.dot(p2t));
  j["stay_overlap"] = std::abs(rep.packet2.dot(p2t));
  out.js("floquet_pair.json", j);
}

inline void run_mott(const ExperimentConfig& c, Sink& out) {
  timelattice::BoseHubbardTimeSpec spec;
  spec.s = inum(c, "s");
  spec.N = inum(c, "N");
  spec.J = num(c, "J");
  spec.U = num(c, "U") *
           Eigen::MatrixXd::Identity(spec.s, spec.s);
  auto rep = timelattice::bose_hubbard_time(spec);
  json j;
  j["energy0"] = rep.energy0;
  j["gap"] = rep.gap;
  std::vector<double> var(rep.site_variance.data(),
                          rep.site_variance.data() + rep.site_variance.size());
  j["site_variance"] = var;
  j["coherence_01"] = std::abs(rep.coherence(0, 1));
  out.js("mott.json", j);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dispatch, manifest, verification.

inline RunManifest run_experiment(const ExperimentConfig& cfg,
                                  int workers = 1) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  detail::Sink out;
  out.dir = cfg.output;
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw io_error("cannot create output directory: " + cfg.output);

  lab::EnsembleOptions opts;
  opts.master_seed = cfg.seed;
  opts.workers = workers < 1 ? 1 : workers;
  if (cfg.params.contains("realizations"))
    opts.n_realizations =
        static_cast<int>(cfg.params["realizations"].get<long>());

  const std::string& e = cfg.experiment;
  if (e == "else_dtc") detail::run_else(cfg, opts, out);
  else if (e == "khemani_sg") detail::run_khemani(cfg, opts, out);
  else if (e == "yao_phase_diagram") detail::run_yao_scan(cfg, opts, out);
  else if (e == "ion_chain") detail::run_ion(cfg, opts, out);
  else if (e == "nv_ensemble") detail::run_nv(cfg, opts, out);
  else if (e == "gpe_ring") detail::run_gpe(cfg, out);
  else if (e == "two_mode_cat") detail::run_two_mode(cfg, out);
  else if (e == "lloyd_time") detail::run_lloyd(cfg, out);
  else if (e == "ring_anderson") detail::run_ring_anderson(cfg, out);
  else if (e == "secular_bands") detail::run_secular_bands(cfg, out);
  else if (e == "phase_crystal") detail::run_phase_crystal(cfg, out);
  else if (e == "bouncer") detail::run_bouncer(cfg, out);
  else if (e == "mott_time") detail::run_mott(cfg, out);
  else throw config_error("unknown experiment name '" + e + "'");

  RunManifest man;
  man.config["experiment"] = cfg.experiment;
  man.config["seed"] = cfg.seed;
  man.config["output"] = cfg.output;
  man.config["params"] = cfg.params;
  for (const std::string& f : out.files)
    man.artifacts.emplace_back(f, sha256_file(out.dir / f));
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json mj;
  mj["tool_version"] = tool_version;
  mj["schema_version"] = schema_version;
  mj["lab_schema_version"] = lab::schema_version;
  mj["config"] = man.config;
  mj["wall_seconds"] = man.wall_seconds;
  json arts = json::array();
  for (const auto& [path, hash] : man.artifacts) {
    json a;
    a["path"] = path;
    a["sha256"] = hash;
    arts.push_back(a);
  }
  mj["artifacts"] = arts;
  lab::write_text_file((out.dir / "manifest.json").string(),
                       mj.dump(2) + "\n");
  return man;
}

// Re-verification: recompute the hash of every artifact the manifest lists.
// Returns human-readable problems; empty means the run directory is intact.
inline std::vector<std::string> check_manifest(const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path dir = out_dir;
  std::vector<std::string> problems;
  json mj;
  try {
    mj = json::parse(lab::read_text_file((dir / "manifest.json").string()));
  } catch (const io_error& e) {
    throw io_error(std::string("check: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("manifest.json: not valid JSON: ") +
                       e.what());
    return problems;
  }
  if (!mj.contains("artifacts") || !mj["artifacts"].is_array()) {
    problems.push_back("manifest.json: missing artifacts array");
    return problems;
  }
  for (const auto& a : mj["artifacts"]) {
    std::string path = a.value("path", "");
    std::string want = a.value("sha256", "");
    if (!fs::exists(dir / path)) {
      problems.push_back(path + ": listed in manifest but missing");
      continue;
    }
    std::string got = sha256_file(dir / path);
    if (got != want)
      problems.push_back(path + ": hash mismatch (expected " + want +
                         ", found " + got + ")");
  }
  return problems;
}

}  // namespace chronolab::cli
