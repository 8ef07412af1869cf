#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/ising_map.hpp"
#include "mimo/replicas.hpp"
#include "mimo/schedule.hpp"
#include "mimo/seed.hpp"

namespace mimo {

// Gibbs chain of p-dits, one per transmitted symbol.
//
// Each update evaluates the energy change to every alphabet point from the
// symbol's local field and resamples the symbol from the Boltzmann weights
// of those candidates. The new value does not depend on the current one.
class DpimChain {
 public:
  DpimChain(const PditModel& model, const Constellation& c, std::uint64_t seed, bool random_scan = false)
      : model_(&model),
        rng_(seed),
        random_scan_(random_scan),
        order_(static_cast<std::size_t>(model.n())),
        weights_(c.alphabet().size()) {
    if (model.j11.rows() != model.n() || model.j12.rows() != model.n()) {
      throw std::invalid_argument("p-dit model coupling shape mismatch");
    }
    for (const Complex& p : c.alphabet()) {
      cand_re_.push_back(p.real());
      cand_im_.push_back(p.imag());
    }
    std::iota(order_.begin(), order_.end(), 0);
    self_ = model.j11.diagonal();
    const auto m = static_cast<double>(cand_re_.size());
    index_.resize(static_cast<std::size_t>(model.n()));
    for (auto& idx : index_) idx = std::min(static_cast<int>(rng_.uniform() * m), static_cast<int>(m) - 1);
    refresh();
  }

  // Sets the chain to given alphabet indices (one per p-dit).
  void set_indices(std::vector<int> indices) {
    if (indices.size() != index_.size()) throw std::invalid_argument("index vector length mismatch");
    for (int idx : indices) {
      if (idx < 0 || idx >= static_cast<int>(cand_re_.size())) throw std::invalid_argument("alphabet index out of range");
    }
    index_ = std::move(indices);
    refresh();
  }

  void sweep(double beta) {
    if (random_scan_) std::shuffle(order_.begin(), order_.end(), rng_.engine());
    const std::size_t m = cand_re_.size();
    for (int i : order_) {
      const int cur = index_[static_cast<std::size_t>(i)];
      const double from_re = cand_re_[static_cast<std::size_t>(cur)];
      const double from_im = cand_im_[static_cast<std::size_t>(cur)];
      const double f_re = field_re_(i);
      const double f_im = field_im_(i);
      const double self = self_(i);
      double max_logit = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < m; ++c) {
        const double de = pdit_delta_from_field(f_re, f_im, self, from_re, from_im, cand_re_[c], cand_im_[c]);
        delta_[c] = de;
        weights_[c] = -beta * de;
        max_logit = std::max(max_logit, weights_[c]);
      }
      double total = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        weights_[c] = std::exp(weights_[c] - max_logit);
        total += weights_[c];
      }
      double target = rng_.uniform() * total;
      std::size_t pick = m - 1;
      for (std::size_t c = 0; c < m; ++c) {
        target -= weights_[c];
        if (target < 0.0) {
          pick = c;
          break;
        }
      }
      if (static_cast<int>(pick) != cur) {
        const double dre = cand_re_[pick] - from_re;
        const double dim = cand_im_[pick] - from_im;
        energy_ += delta_[pick];
        const auto j11_col = model_->j11.col(i);
        const auto j12_col = model_->j12.col(i);
        field_re_.noalias() += dre * j11_col + dim * j12_col;
        field_im_.noalias() += dim * j11_col - dre * j12_col;
        index_[static_cast<std::size_t>(i)] = static_cast<int>(pick);
      }
    }
  }

  PditState state() const {
    PditState d(static_cast<Eigen::Index>(index_.size()), 2);
    for (std::size_t i = 0; i < index_.size(); ++i) {
      d(static_cast<Eigen::Index>(i), 0) = cand_re_[static_cast<std::size_t>(index_[i])];
      d(static_cast<Eigen::Index>(i), 1) = cand_im_[static_cast<std::size_t>(index_[i])];
    }
    return d;
  }

  const std::vector<int>& indices() const noexcept { return index_; }
  double energy() const noexcept { return energy_; }

 private:
  void refresh() {
    delta_.assign(cand_re_.size(), 0.0);
    const PditState d = state();
    const PditState field = pdit_local_field(d, *model_);
    field_re_ = field.col(0);
    field_im_ = field.col(1);
    energy_ = pdit_energy(d, *model_);
  }

  const PditModel* model_;
  Rng rng_;
  bool random_scan_;
  std::vector<int> order_;
  std::vector<double> cand_re_;
  std::vector<double> cand_im_;
  std::vector<double> weights_;
  std::vector<double> delta_;
  std::vector<int> index_;
  RVector self_;
  RVector field_re_;
  RVector field_im_;
  double energy_ = 0.0;
};

inline ReplicaResult<PditState> dpim_replica(const PditModel& model, const Constellation& c,
                                             const AnnealSchedule& schedule, std::uint64_t seed,
                                             bool random_scan = false) {
  DpimChain chain(model, c, seed, random_scan);
  ReplicaResult<PditState> out;
  out.best_energy = std::numeric_limits<double>::infinity();
  std::vector<int> best;
  for (int k = 1; k <= schedule.n_iterations; ++k) {
    chain.sweep(schedule.at(k));
    if (chain.energy() < out.best_energy) {
      out.best_energy = chain.energy();
      best = chain.indices();
      out.best_iteration = k;
    }
  }
  out.final_energy = pdit_energy(chain.state(), model);
  chain.set_indices(best);
  out.best_state = chain.state();
  out.best_energy = pdit_energy(out.best_state, model);
  return out;
}

inline SolveOutcome<PditState> dpim_solve(const PditModel& model, const Constellation& c, const SolverConfig& cfg) {
  cfg.validate();
  auto out = run_replicated(
      [&](std::uint64_t seed) { return dpim_replica(model, c, cfg.schedule, seed, cfg.random_scan); },
      cfg.replicas, cfg.seed, cfg.threads);
  out.iterations = static_cast<long long>(cfg.replicas) * cfg.schedule.n_iterations;
  return out;
}

}  // namespace mimo
