#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/constellation.hpp"

namespace mimo {

enum class Paradigm { bpim, dpim, oim };

inline std::string_view to_string(Paradigm p) noexcept {
  switch (p) {
    case Paradigm::bpim: return "bpim";
    case Paradigm::dpim: return "dpim";
    case Paradigm::oim: return "oim";
  }
  return "?";
}

inline Paradigm parse_paradigm(std::string_view name) {
  if (name == "bpim") return Paradigm::bpim;
  if (name == "dpim") return Paradigm::dpim;
  if (name == "oim") return Paradigm::oim;
  throw std::invalid_argument("unknown paradigm '" + std::string(name) + "'");
}

// Linear annealing ramp evaluated at iterations k = 1..n_iterations.
// A beta ramp rises to `peak` at the last iteration; a temperature ramp
// falls from `peak` and reaches zero at the last iteration.
struct AnnealSchedule {
  enum class Kind { beta_ramp, temperature_ramp };

  Kind kind = Kind::beta_ramp;
  double peak = 1.0;
  int n_iterations = 100;

  void validate() const {
    if (!(peak > 0.0) || !std::isfinite(peak)) throw std::invalid_argument("schedule peak must be positive");
    if (n_iterations < 1) throw std::invalid_argument("schedule needs at least one iteration");
  }

  double at(int k) const noexcept {
    const double frac = static_cast<double>(k) / n_iterations;
    return kind == Kind::beta_ramp ? peak * frac : peak * (1.0 - frac);
  }

  static AnnealSchedule beta(double beta_max, int n_iterations) {
    return {Kind::beta_ramp, beta_max, n_iterations};
  }
  static AnnealSchedule temperature(double t_max, int n_iterations) {
    return {Kind::temperature_ramp, t_max, n_iterations};
  }
};

struct OimParams {
  double coupling = 1.0;      // K
  double binarization = 1.0;  // S
  double dt = 0.01;
};

struct SolverConfig {
  int replicas = 64;
  AnnealSchedule schedule;
  std::uint64_t seed = 0;
  OimParams oim;
  bool random_scan = false;  // shuffle the update order each sweep
  int threads = 1;           // replica-level parallelism

  void validate() const {
    if (replicas < 1) throw std::invalid_argument("need at least one replica");
    if (!(oim.dt > 0.0)) throw std::invalid_argument("OIM time step must be positive");
    schedule.validate();
  }
};

// Best result of one solver kernel run.
template <class State>
struct ReplicaResult {
  State best_state;
  double best_energy = 0.0;
  int best_iteration = 0;
  double final_energy = 0.0;
};

template <class State>
struct SolveOutcome {
  State best_state;
  double best_energy = 0.0;
  std::vector<double> replica_final_energies;
  int best_replica = 0;
  int best_iteration = 0;
  long long iterations = 0;  // total across replicas
};

struct ParadigmParameters {
  AnnealSchedule schedule;
  int replicas = 64;
  OimParams oim;
};

inline constexpr int kDefaultIterations = 100;
inline constexpr int kDefaultReplicas = 64;
inline constexpr double kOimTemperatureMax = 30.0;

// Scaling-law defaults: bPIM beta_max = sqrt(3) N^-2/3 (BPSK) or
// 13 / (N sqrt(M)) (QAM); dPIM beta_max = sqrt(2) N^-4/5 for every M;
// OIM (BPSK only) K = 3.5 N^-2/3, S = 1.3 N^-2/3, T_max = 30.
inline ParadigmParameters default_parameters(Paradigm p, int n, int order) {
  if (n < 1) throw std::invalid_argument("antenna count must be positive");
  if (!is_valid_order(order)) throw std::invalid_argument("invalid modulation order " + std::to_string(order));
  const double nn = static_cast<double>(n);
  ParadigmParameters out;
  out.replicas = kDefaultReplicas;
  switch (p) {
    case Paradigm::bpim: {
      const double beta = order == 2 ? std::sqrt(3.0) * std::pow(nn, -2.0 / 3.0)
                                     : 13.0 / (nn * std::sqrt(static_cast<double>(order)));
      out.schedule = AnnealSchedule::beta(beta, kDefaultIterations);
      break;
    }
    case Paradigm::dpim:
      out.schedule = AnnealSchedule::beta(std::sqrt(2.0) * std::pow(nn, -0.8), kDefaultIterations);
      break;
    case Paradigm::oim:
      if (order != 2) throw std::invalid_argument("the oscillator machine is only configured for BPSK");
      out.schedule = AnnealSchedule::temperature(kOimTemperatureMax, kDefaultIterations);
      out.oim.coupling = 3.5 * std::pow(nn, -2.0 / 3.0);
      out.oim.binarization = 1.3 * std::pow(nn, -2.0 / 3.0);
      out.oim.dt = 0.01;
      break;
  }
  return out;
}

inline SolverConfig make_config(const ParadigmParameters& params, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.replicas = params.replicas;
  cfg.schedule = params.schedule;
  cfg.oim = params.oim;
  cfg.seed = seed;
  return cfg;
}

}  // namespace mimo
