#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mimo/ber_sweep.hpp"
#include "mimo/beta_sweep.hpp"
#include "mimo/plan.hpp"

namespace mimo {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kCsvHeader =
    "detector,N,M,ebn0_db,bits,errors,ber,ber_upper_95,replicas,iterations,seed";

namespace detail {
inline std::string fmt_g(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}
}  // namespace detail

inline void write_csv(std::ostream& out, const std::vector<BerPoint>& points) {
  out << kCsvHeader << "\n";
  for (const BerPoint& p : points) {
    out << p.detector << "," << p.n << "," << p.order << "," << detail::fmt_g(p.ebn0_db) << "," << p.bits_transmitted
        << "," << p.bit_errors << "," << detail::fmt_g(p.ber) << "," << detail::fmt_g(p.ber_upper_95) << ","
        << p.replicas << "," << p.iterations << "," << p.seed << "\n";
  }
}

// Opens `path` for writing (creating parent directories) or throws. Called
// before any computation so a bad output path fails fast.
inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

inline nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json j;
  j["n"] = plan.n;
  j["mod"] = plan.order;
  j["ebn0"] = plan.ebn0_db;
  j["bits"] = plan.total_bits;
  j["channels"] = plan.n_channels;
  j["messages_per_channel"] = plan.messages_per_channel;
  j["bits_per_message"] = plan.bits_per_message;
  std::vector<std::string> dets;
  for (DetectorKind d : plan.detectors) dets.emplace_back(to_string(d));
  j["detectors"] = dets;
  j["seed"] = plan.seed;
  j["noiseless"] = plan.noiseless;
  if (plan.overrides.replicas) j["replicas"] = *plan.overrides.replicas;
  if (plan.overrides.iterations) j["iters"] = *plan.overrides.iterations;
  if (plan.overrides.peak) j["peak"] = *plan.overrides.peak;
  return j;
}

inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
  ExperimentPlan plan = plan_experiment(j.at("n").get<int>(), j.at("mod").get<int>(),
                                        j.at("ebn0").get<std::vector<double>>(), j.at("bits").get<std::int64_t>(),
                                        j.at("seed").get<std::uint64_t>(),
                                        j.value("messages_per_channel", kMessagesPerChannel));
  for (const auto& d : j.at("detectors")) plan.detectors.push_back(parse_detector(d.get<std::string>()));
  plan.noiseless = j.value("noiseless", false);
  if (j.contains("replicas")) plan.overrides.replicas = j["replicas"].get<int>();
  if (j.contains("iters")) plan.overrides.iterations = j["iters"].get<int>();
  if (j.contains("peak")) plan.overrides.peak = j["peak"].get<double>();
  return plan;
}

// Everything needed to reproduce a run: the plan (including the master seed
// from which every channel, message, noise and solver seed is derived) and
// the resolved heuristic parameters.
inline nlohmann::json make_manifest(const ExperimentPlan& plan) {
  nlohmann::json m;
  m["tool"] = "mimo_bench";
  m["version"] = kVersion;
  m["plan"] = plan_to_json(plan);
  m["seed_derivation"] =
      "splitmix64 chain over (master seed, role, indices); roles: channel{c}, message{c,m}, noise{c,m}, "
      "solver{c,m,ebn0_index,detector_index}, replica{r}";
  nlohmann::json params = nlohmann::json::object();
  for (DetectorKind d : plan.detectors) {
    if (!is_heuristic(d)) continue;
    const ParadigmParameters p = resolve_parameters(plan, d);
    nlohmann::json pj;
    pj["replicas"] = p.replicas;
    pj["iterations"] = p.schedule.n_iterations;
    pj["schedule"] = p.schedule.kind == AnnealSchedule::Kind::beta_ramp ? "beta_linear" : "temperature_linear";
    pj["peak"] = p.schedule.peak;
    if (d == DetectorKind::oim) {
      pj["K"] = p.oim.coupling;
      pj["S"] = p.oim.binarization;
      pj["dt"] = p.oim.dt;
    }
    params[std::string(to_string(d))] = pj;
  }
  m["parameters"] = params;
  return m;
}

inline ExperimentPlan plan_from_manifest(const nlohmann::json& manifest) { return plan_from_json(manifest.at("plan")); }

inline void write_console_summary(std::ostream& out, const std::vector<BerPoint>& points) {
  for (const BerPoint& p : points) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6s N=%-5d M=%-4d Eb/N0=%6.2f dB  errors=%10lld / %lld  BER=%.4e%s\n",
                  p.detector.c_str(), p.n, p.order, p.ebn0_db, static_cast<long long>(p.bit_errors),
                  static_cast<long long>(p.bits_transmitted), p.ber, p.bit_errors == 0 ? " (upper bound)" : "");
    out << line;
    if (p.bit_errors == 0) {
      std::snprintf(line, sizeof line, "%52s<= %.3e at 95%%\n", "", p.ber_upper_95);
      out << line;
    }
    if (p.failures > 0) out << "       " << p.failures << " detector failures counted as all-bits-wrong\n";
  }
}

inline void write_beta_curve_csv(std::ostream& out, const std::vector<BetaCurve>& curves) {
  out << "paradigm,N,M,beta_max,mean_energy,std_error\n";
  for (const BetaCurve& c : curves) {
    for (std::size_t g = 0; g < c.beta_grid.size(); ++g) {
      out << to_string(c.paradigm) << "," << c.n << "," << c.order << "," << detail::fmt_g(c.beta_grid[g]) << ","
          << detail::fmt_g(c.mean_energy[g]) << "," << detail::fmt_g(c.std_error[g]) << "\n";
    }
  }
}

}  // namespace mimo
