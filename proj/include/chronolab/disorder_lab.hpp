#pragma once

// Reproducible disorder-ensemble execution: per-realization seeding from a
// master seed, a worker pool over independent realizations, deterministic
// index-order aggregation, (Jz, eps) phase-diagram scans and JSON/CSV
// persistence with bit-exact double round trips.

#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

#include "chronolab/common.hpp"
#include "chronolab/floquet_observables.hpp"
#include "chronolab/spin_models.hpp"

namespace chronolab::lab {

inline constexpr int schema_version = 1;

struct EnsembleOptions {
  int n_realizations = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

struct RunRecord {
  int n_requested = 0;
  int n_ok = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> values;  // empty for failed realizations
  std::vector<std::string> errors;          // empty string when ok
  std::vector<double> mean;
  std::vector<double> sem;
  double wall_seconds = 0.0;
};

// Runs task(seed) for seeds master_seed + 0 .. n-1 on a small thread pool.
// Results land in index order, so aggregates are bit-identical for any
// worker count; failed realizations are recorded and excluded.
template <typename Task>
RunRecord run_ensemble(const EnsembleOptions& o, Task&& task) {
  if (o.n_realizations < 1)
    throw contract_error("run_ensemble: n_realizations must be >= 1");
  int workers = std::max(1, o.workers);
  auto t0 = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.n_requested = o.n_realizations;
  rec.seeds.resize(o.n_realizations);
  rec.values.resize(o.n_realizations);
  rec.errors.resize(o.n_realizations);
  for (int k = 0; k < o.n_realizations; ++k)
    rec.seeds[k] = o.master_seed + static_cast<std::uint64_t>(k);

  std::atomic<int> next{0};
  auto body = [&] {
    for (;;) {
      int k = next.fetch_add(1);
      if (k >= o.n_realizations) return;
      try {
        rec.values[k] = task(rec.seeds[k]);
      } catch (const std::exception& e) {
        rec.errors[k] = e.what();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }

  // deterministic sequential reduce in index order
  std::size_t width = 0;
  for (int k = 0; k < o.n_realizations; ++k)
    if (rec.errors[k].empty()) {
      if (rec.n_ok == 0) width = rec.values[k].size();
      else if (rec.values[k].size() != width)
        throw contract_error("run_ensemble: inconsistent observable width");
      ++rec.n_ok;
    }
  rec.mean.assign(width, 0.0);
  rec.sem.assign(width, 0.0);
  if (rec.n_ok > 0) {
    for (int k = 0; k < o.n_realizations; ++k) {
      if (!rec.errors[k].empty()) continue;
      for (std::size_t j = 0; j < width; ++j) rec.mean[j] += rec.values[k][j];
    }
    for (std::size_t j = 0; j < width; ++j) rec.mean[j] /= rec.n_ok;
    if (rec.n_ok > 1) {
      for (int k = 0; k < o.n_realizations; ++k) {
        if (!rec.errors[k].empty()) continue;
        for (std::size_t j = 0; j < width; ++j) {
          double d = rec.values[k][j] - rec.mean[j];
          rec.sem[j] += d * d;
        }
      }
      for (std::size_t j = 0; j < width; ++j)
        rec.sem[j] = std::sqrt(rec.sem[j] / (rec.n_ok * (rec.n_ok - 1.0)));
    }
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

// ---------------------------------------------------------------------------
// Spin-model ensembles: disorder-averaged stroboscopic traces.

using ModelSpec =
    std::variant<spins::KhemaniSpec, spins::MinimalSpec, spins::ElseSpec,
                 spins::YaoSpec, spins::IonSpec, spins::NVSpec>;

inline int model_sites(const ModelSpec& m) {
  return std::visit([](const auto& s) { return s.L; }, m);
}

inline std::string model_name(const ModelSpec& m) {
  switch (m.index()) {
    case 0: return "khemani";
    case 1: return "minimal";
    case 2: return "else";
    case 3: return "yao";
    case 4: return "ion";
    default: return "nv";
  }
}

inline UnitaryOperator build_floquet(const ModelSpec& m, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, spins::KhemaniSpec>)
          return spins::build_floquet_khemani(s, spins::sample_khemani(s, seed));
        else if constexpr (std::is_same_v<S, spins::MinimalSpec>)
          return spins::build_floquet_minimal(s, spins::sample_minimal(s, seed));
        else if constexpr (std::is_same_v<S, spins::ElseSpec>)
          return spins::build_floquet_else(s, spins::sample_else(s, seed));
        else if constexpr (std::is_same_v<S, spins::YaoSpec>)
          return spins::build_floquet_yao(s, spins::sample_yao(s, seed));
        else if constexpr (std::is_same_v<S, spins::IonSpec>)
          return spins::build_floquet_ion(s, spins::sample_ion(s, seed));
        else
          return spins::build_floquet_nv(s, spins::sample_nv(s, seed));
      },
      m);
}

// Natural probe for each model: sigma^z from the fully polarized z state,
// except the ion drive, which lives in the x-product basis and is probed
// with the (diagonal) sigma^x from the all-down x state.
inline void trace_setup(const ModelSpec& m, int site, cxvec& psi0, cxmat& op) {
  int L = model_sites(m);
  if (site < 0 || site >= L)
    throw contract_error("trace_setup: site out of range");
  long dim = 1L << L;
  check_capacity(dim, "trace_setup");
  psi0 = cxvec::Zero(dim);
  op = cxmat::Zero(dim, dim);
  if (model_name(m) == "ion") {
    psi0[dim - 1] = 1.0;
    for (long n = 0; n < dim; ++n) op(n, n) = spin_sign(n, site);
  } else {
    psi0[0] = 1.0;
    op = pauli_site(L, site, 'z').matrix();
  }
}

inline RunRecord ensemble_trace(const ModelSpec& m, const EnsembleOptions& o,
                                int n_periods, int site) {
  cxvec psi0;
  cxmat opm;
  trace_setup(m, site, psi0, opm);
  HermitianOperator op(std::move(opm));
  return run_ensemble(o, [&, psi0](std::uint64_t seed) {
    auto u = build_floquet(m, seed);
    auto ts = observables::magnetization_trace(u, psi0, op, n_periods);
    return ts.values;
  });
}

inline observables::TimeSeries averaged_trace(const RunRecord& rec) {
  observables::TimeSeries ts;
  ts.values = rec.mean;
  return ts;
}

inline observables::SubharmonicReport subharmonic_of(const RunRecord& rec) {
  return observables::subharmonic_peak(
      observables::dft_series(averaged_trace(rec)));
}

// ---------------------------------------------------------------------------
// (Jz, eps) phase-diagram scan for the long-range drive.

struct ScanGrid {
  std::vector<double> Jz;   // ascending
  std::vector<double> eps;  // ascending
  spins::YaoSpec base;
  EnsembleOptions opts;
  int n_periods = 100;
  int site = 0;
};

inline void validate_grid(const ScanGrid& g) {
  if (g.Jz.empty() || g.eps.empty())
    throw contract_error("scan_phase_diagram: empty axis");
  if (!std::is_sorted(g.Jz.begin(), g.Jz.end()) ||
      !std::is_sorted(g.eps.begin(), g.eps.end()))
    throw contract_error("scan_phase_diagram: axes must be ascending");
}

struct ScanCell {
  double Jz = 0.0;
  double eps = 0.0;
  observables::SubharmonicReport report;
  int n_ok = 0;
};

inline std::vector<std::vector<ScanCell>> scan_phase_diagram(
    const ScanGrid& g) {
  validate_grid(g);
  std::vector<std::vector<ScanCell>> cells;
  for (double jz : g.Jz) {
    std::vector<ScanCell> row;
    for (double ep : g.eps) {
      spins::YaoSpec s = g.base;
      s.Jz = jz;
      s.epsilon = ep;
      auto rec = ensemble_trace(ModelSpec(s), g.opts, g.n_periods, g.site);
      ScanCell c;
      c.Jz = jz;
      c.eps = ep;
      c.report = subharmonic_of(rec);
      c.n_ok = rec.n_ok;
      row.push_back(c);
    }
    cells.push_back(std::move(row));
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Persistence.  Doubles are stored as hex-encoded IEEE-754 bit patterns by
// default so save -> load -> save is byte-identical; plain decimal is a flag.

namespace detail {

inline std::string hex_double(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(bits));
  return buf;
}

inline double unhex_double(const std::string& s) {
  if (s.size() != 16) throw io_error("bad hex double: " + s);
  std::uint64_t bits = std::stoull(s, nullptr, 16);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline nlohmann::ordered_json encode_array(const std::vector<double>& v,
                                           bool hex) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (double x : v) {
    if (hex) a.push_back(hex_double(x));
    else a.push_back(x);
  }
  return a;
}

inline std::vector<double> decode_array(const nlohmann::json& a) {
  std::vector<double> v;
  for (const auto& x : a) {
    if (x.is_string()) v.push_back(unhex_double(x.get<std::string>()));
    else v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const RunRecord& r,
                                             bool hex = true) {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["kind"] = "run_record";
  j["hex_doubles"] = hex;
  j["n_requested"] = r.n_requested;
  j["n_ok"] = r.n_ok;
  j["seeds"] = r.seeds;
  j["errors"] = r.errors;
  nlohmann::ordered_json vals = nlohmann::ordered_json::array();
  for (const auto& v : r.values) vals.push_back(detail::encode_array(v, hex));
  j["values"] = vals;
  j["mean"] = detail::encode_array(r.mean, hex);
  j["sem"] = detail::encode_array(r.sem, hex);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != schema_version)
    throw io_error("record_from_json: unsupported schema version");
  if (j.value("kind", "") != "run_record")
    throw io_error("record_from_json: not a run record");
  RunRecord r;
  r.n_requested = j["n_requested"].get<int>();
  r.n_ok = j["n_ok"].get<int>();
  r.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  r.errors = j["errors"].get<std::vector<std::string>>();
  for (const auto& v : j["values"]) r.values.push_back(detail::decode_array(v));
  r.mean = detail::decode_array(j["mean"]);
  r.sem = detail::decode_array(j["sem"]);
  r.wall_seconds = j["wall_seconds"].get<double>();
  return r;
}

inline nlohmann::ordered_json scan_to_json(
    const std::vector<std::vector<ScanCell>>& cells, bool hex = true) {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["kind"] = "scan";
  j["hex_doubles"] = hex;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : cells) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      nlohmann::ordered_json jc;
      jc["Jz"] = hex ? nlohmann::ordered_json(detail::hex_double(c.Jz))
                     : nlohmann::ordered_json(c.Jz);
      jc["eps"] = hex ? nlohmann::ordered_json(detail::hex_double(c.eps))
                      : nlohmann::ordered_json(c.eps);
      jc["peak_height"] =
          hex ? nlohmann::ordered_json(detail::hex_double(c.report.peak_height))
              : nlohmann::ordered_json(c.report.peak_height);
      jc["peak_center"] =
          hex ? nlohmann::ordered_json(detail::hex_double(c.report.peak_center))
              : nlohmann::ordered_json(c.report.peak_center);
      jc["peak_variance"] =
          hex ? nlohmann::ordered_json(
                    detail::hex_double(c.report.peak_variance))
              : nlohmann::ordered_json(c.report.peak_variance);
      jc["locked"] = c.report.locked;
      jc["n_ok"] = c.n_ok;
      jr.push_back(jc);
    }
    rows.push_back(jr);
  }
  j["cells"] = rows;
  return j;
}

inline std::vector<std::vector<ScanCell>> scan_from_json(
    const nlohmann::json& j) {
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != schema_version)
    throw io_error("scan_from_json: unsupported schema version");
  if (j.value("kind", "") != "scan") throw io_error("scan_from_json: not a scan");
  auto get_d = [](const nlohmann::json& x) {
    return x.is_string() ? detail::unhex_double(x.get<std::string>())
                         : x.get<double>();
  };
  std::vector<std::vector<ScanCell>> cells;
  for (const auto& jr : j["cells"]) {
    std::vector<ScanCell> row;
    for (const auto& jc : jr) {
      ScanCell c;
      c.Jz = get_d(jc["Jz"]);
      c.eps = get_d(jc["eps"]);
      c.report.peak_height = get_d(jc["peak_height"]);
      c.report.peak_center = get_d(jc["peak_center"]);
      c.report.peak_variance = get_d(jc["peak_variance"]);
      c.report.locked = jc["locked"].get<bool>();
      c.n_ok = jc["n_ok"].get<int>();
      row.push_back(c);
    }
    cells.push_back(std::move(row));
  }
  return cells;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw io_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void persist(const RunRecord& r, const std::string& path,
                    bool hex = true) {
  write_text_file(path, record_to_json(r, hex).dump(2) + "\n");
}

inline RunRecord load_record(const std::string& path) {
  return record_from_json(nlohmann::json::parse(read_text_file(path)));
}

inline void persist(const std::vector<std::vector<ScanCell>>& cells,
                    const std::string& path, bool hex = true) {
  write_text_file(path, scan_to_json(cells, hex).dump(2) + "\n");
}

inline std::vector<std::vector<ScanCell>> load_scan(const std::string& path) {
  return scan_from_json(nlohmann::json::parse(read_text_file(path)));
}

// CSV export with the fixed header rows used by the result schema.
inline void export_csv(const observables::TimeSeries& ts,
                       const std::string& path) {
  std::ostringstream ss;
  ss << "period_index,value\n";
  ss.precision(17);
  for (std::size_t n = 0; n < ts.values.size(); ++n)
    ss << n << "," << ts.values[n] << "\n";
  write_text_file(path, ss.str());
}

inline void export_csv(const observables::DftSpectrum& s,
                       const std::string& path) {
  std::ostringstream ss;
  ss << "freq_cycles_per_period,magnitude\n";
  ss.precision(17);
  for (std::size_t k = 0; k < s.freq.size(); ++k)
    ss << s.freq[k] << "," << s.mag[k] << "\n";
  write_text_file(path, ss.str());
}

}  // namespace chronolab::lab
