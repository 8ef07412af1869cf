#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "mimo/ising_map.hpp"
#include "mimo/replicas.hpp"
#include "mimo/schedule.hpp"
#include "mimo/seed.hpp"

namespace mimo {

// Gibbs chain of p-bits on a binary Ising model.
//
// Update rule: s_i <- sgn(u + tanh(beta * I_i)), u ~ U(-1, 1), with local
// field I_i = sum_j J_ij s_j + h_i kept up to date incrementally.
class BpimChain {
 public:
  BpimChain(const BinaryIsingModel& model, std::uint64_t seed, bool random_scan = false)
      : model_(&model), rng_(seed), random_scan_(random_scan), order_(static_cast<std::size_t>(model.n)) {
    std::iota(order_.begin(), order_.end(), 0);
    RVector s(model.n);
    for (int i = 0; i < model.n; ++i) s(i) = (rng_.bits() >> 63) ? 1.0 : -1.0;
    set_state(s);
  }

  void set_state(const RVector& s) {
    s_ = s;
    field_ = model_->j_matrix * s_ + model_->h_vector;
    energy_ = binary_energy(s_, *model_);
  }

  void sweep(double beta) {
    if (random_scan_) std::shuffle(order_.begin(), order_.end(), rng_.engine());
    const auto& j = model_->j_matrix;
    for (int i : order_) {
      const double u = 2.0 * rng_.uniform() - 1.0;
      const double next = (u + std::tanh(beta * field_(i)) >= 0.0) ? 1.0 : -1.0;
      if (next != s_(i)) {
        energy_ += 2.0 * s_(i) * field_(i);
        field_.noalias() += (2.0 * next) * j.col(i);
        s_(i) = next;
      }
    }
  }

  const RVector& state() const noexcept { return s_; }
  const RVector& local_field() const noexcept { return field_; }
  // Tracked incrementally; agrees with binary_energy(state()) up to rounding.
  double energy() const noexcept { return energy_; }

 private:
  const BinaryIsingModel* model_;
  Rng rng_;
  bool random_scan_;
  std::vector<int> order_;
  RVector s_;
  RVector field_;
  double energy_ = 0.0;
};

inline ReplicaResult<RVector> bpim_replica(const BinaryIsingModel& model, const AnnealSchedule& schedule,
                                           std::uint64_t seed, bool random_scan = false) {
  BpimChain chain(model, seed, random_scan);
  ReplicaResult<RVector> out;
  out.best_energy = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= schedule.n_iterations; ++k) {
    chain.sweep(schedule.at(k));
    if (chain.energy() < out.best_energy) {
      out.best_energy = chain.energy();
      out.best_state = chain.state();
      out.best_iteration = k;
    }
  }
  out.best_energy = binary_energy(out.best_state, model);
  out.final_energy = binary_energy(chain.state(), model);
  return out;
}

inline SolveOutcome<RVector> bpim_solve(const BinaryIsingModel& model, const SolverConfig& cfg) {
  cfg.validate();
  auto out = run_replicated(
      [&](std::uint64_t seed) { return bpim_replica(model, cfg.schedule, seed, cfg.random_scan); },
      cfg.replicas, cfg.seed, cfg.threads);
  out.iterations = static_cast<long long>(cfg.replicas) * cfg.schedule.n_iterations;
  return out;
}

}  // namespace mimo
