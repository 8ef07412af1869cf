#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimo/bpim.hpp"
#include "mimo/channel.hpp"
#include "mimo/dpim.hpp"
#include "mimo/ising_map.hpp"
#include "mimo/oim.hpp"
#include "mimo/replicas.hpp"
#include "mimo/schedule.hpp"

namespace mimo {

struct BetaSweepOptions {
  std::vector<double> ebn0_db{3.0, 6.0, 9.0};
  int instances_per_ebn0 = 20;
  int trials = 100;
  int n_iterations = kDefaultIterations;
  int random_samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Normalized mean final energy as a function of the schedule peak.
//
// Energies are residuals ||y - Hx||^2 of the final single-replica state,
// divided per instance by the mean residual of uniformly random states, so
// the curve tends to 1 as the peak goes to zero.
struct BetaCurve {
  Paradigm paradigm = Paradigm::bpim;
  int n = 0;
  int order = 2;
  std::vector<double> beta_grid;
  std::vector<double> mean_energy;
  std::vector<double> std_error;
  int argmin = 0;
  double beta_min = 0.0;  // log-parabola refinement around the grid minimum
};

inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi and >= 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  return g;
}

namespace detail {

// Mean residual over uniformly random states and one final residual per
// (grid point, trial) for a single instance.
struct InstanceSweep {
  double random_mean = 0.0;
  std::vector<double> final_residual;  // grid-major
};

inline InstanceSweep sweep_instance(Paradigm paradigm, const MimoInstance& inst, const Constellation& c,
                                    const std::vector<double>& grid, const BetaSweepOptions& opts,
                                    std::uint64_t seed) {
  InstanceSweep out;
  out.final_residual.resize(grid.size() * static_cast<std::size_t>(opts.trials));
  Rng rng(derive_seed(seed, SeedRole::beta_sweep, {0xffff}));
  const auto& alphabet = c.alphabet();
  double acc = 0.0;
  for (int r = 0; r < opts.random_samples; ++r) {
    CVector x(inst.n_tx);
    for (int i = 0; i < inst.n_tx; ++i) {
      x(i) = alphabet[static_cast<std::size_t>(rng.bits() % alphabet.size())];
    }
    acc += residual_energy(inst.channel, inst.rx_vector, x);
  }
  out.random_mean = acc / opts.random_samples;

  if (paradigm == Paradigm::dpim) {
    const PditModel model = build_pdit_model(inst.channel, inst.rx_vector, c);
    const double shift = inst.rx_vector.squaredNorm();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const AnnealSchedule sched = AnnealSchedule::beta(grid[g], opts.n_iterations);
      for (int t = 0; t < opts.trials; ++t) {
        const auto res = dpim_replica(model, c, sched, derive_seed(seed, SeedRole::beta_sweep, {1, static_cast<std::uint64_t>(t)}));
        out.final_residual[g * static_cast<std::size_t>(opts.trials) + static_cast<std::size_t>(t)] = res.final_energy + shift;
      }
    }
    return out;
  }
  const BinaryIsingModel model = build_binary_model(inst);
  ParadigmParameters oim_defaults;
  if (paradigm == Paradigm::oim) oim_defaults = default_parameters(Paradigm::oim, inst.n_tx, inst.order);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int t = 0; t < opts.trials; ++t) {
      const std::uint64_t s = derive_seed(seed, SeedRole::beta_sweep, {1, static_cast<std::uint64_t>(t)});
      double final_energy = 0.0;
      if (paradigm == Paradigm::bpim) {
        final_energy = bpim_replica(model, AnnealSchedule::beta(grid[g], opts.n_iterations), s).final_energy;
      } else {
        final_energy =
            oim_replica(model, oim_defaults.oim, AnnealSchedule::temperature(grid[g], opts.n_iterations), s).final_energy;
      }
      out.final_residual[g * static_cast<std::size_t>(opts.trials) + static_cast<std::size_t>(t)] =
          final_energy + model.offset;
    }
  }
  return out;
}

}  // namespace detail

// Sweeps the schedule peak (beta_max; T_max for the OIM) over `grid` on a pool
// of instances drawn at each Eb/N0 of `opts`. Trials reuse the same seeds at
// every grid point so the curve shape is not masked by sampling noise.
inline BetaCurve beta_sweep(int n, int order, Paradigm paradigm, const std::vector<double>& grid,
                            const BetaSweepOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("beta_sweep: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("beta_sweep: grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("beta_sweep: grid must be strictly increasing");
  }
  if (opts.instances_per_ebn0 < 1 || opts.trials < 1 || opts.ebn0_db.empty()) {
    throw std::invalid_argument("beta_sweep: need instances, trials and Eb/N0 values");
  }
  if (paradigm == Paradigm::oim && order != 2) throw std::invalid_argument("beta_sweep: OIM is BPSK only");
  const Constellation c(order);
  const int per = opts.instances_per_ebn0;
  const int total = per * static_cast<int>(opts.ebn0_db.size());
  std::vector<detail::InstanceSweep> sweeps(static_cast<std::size_t>(total));

  parallel_for(total, opts.threads, [&](int k) {
    const auto e = static_cast<std::uint64_t>(k / per);
    const auto i = static_cast<std::uint64_t>(k % per);
    const std::uint64_t base = derive_seed(opts.seed, SeedRole::beta_sweep, {e, i});
    const SeedInfo seeds{derive_seed(base, SeedRole::channel), derive_seed(base, SeedRole::message),
                         derive_seed(base, SeedRole::noise)};
    const MimoInstance inst = make_instance(n, c, opts.ebn0_db[e], seeds);
    sweeps[static_cast<std::size_t>(k)] =
        detail::sweep_instance(paradigm, inst, c, grid, opts, derive_seed(base, SeedRole::solver));
  });

  BetaCurve curve;
  curve.paradigm = paradigm;
  curve.n = n;
  curve.order = order;
  curve.beta_grid = grid;
  curve.mean_energy.assign(grid.size(), 0.0);
  curve.std_error.assign(grid.size(), 0.0);
  const auto trials = static_cast<std::size_t>(opts.trials);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    // Per-instance normalized means; the error bar is across instances.
    std::vector<double> per_instance;
    for (const auto& s : sweeps) {
      double acc = 0.0;
      for (std::size_t t = 0; t < trials; ++t) acc += s.final_residual[g * trials + t];
      per_instance.push_back(acc / static_cast<double>(trials) / s.random_mean);
    }
    double mean = 0.0;
    for (double v : per_instance) mean += v;
    mean /= static_cast<double>(per_instance.size());
    double var = 0.0;
    for (double v : per_instance) var += (v - mean) * (v - mean);
    const double count = static_cast<double>(per_instance.size());
    curve.mean_energy[g] = mean;
    curve.std_error[g] = count > 1 ? std::sqrt(var / (count - 1) / count) : 0.0;
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (curve.mean_energy[g] < curve.mean_energy[best]) best = g;
  }
  curve.argmin = static_cast<int>(best);
  curve.beta_min = grid[best];
  if (best > 0 && best + 1 < grid.size()) {
    const double x0 = std::log(grid[best - 1]), x1 = std::log(grid[best]), x2 = std::log(grid[best + 1]);
    const double y0 = curve.mean_energy[best - 1], y1 = curve.mean_energy[best], y2 = curve.mean_energy[best + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a > 0.0) {
      const double vertex = -b / (2.0 * a);
      if (vertex >= x0 && vertex <= x2) curve.beta_min = std::exp(vertex);
    }
  }
  return curve;
}

enum class ScalingFamily {
  qam,         // beta_0 = c * (N sqrt(M))^p
  antennas,    // beta_0 = c * N^p  (BPSK bPIM/OIM, and the dPIM for any M)
};

struct ScalingPoint {
  int n = 0;
  int order = 2;
  double beta0 = 0.0;
};

struct ScalingFit {
  double constant = 0.0;
  double exponent = 0.0;
  double rms_residual = 0.0;  // in log space
};

// Least-squares line through (log x, log beta_0), x = N sqrt(M) or N.
inline ScalingFit fit_scaling_law(const std::vector<ScalingPoint>& points, ScalingFamily family) {
  if (points.size() < 3) throw std::invalid_argument("fit_scaling_law: need at least 3 points");
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const ScalingPoint& p = points[static_cast<std::size_t>(i)];
    if (!(p.beta0 > 0.0) || p.n < 1) throw std::invalid_argument("fit_scaling_law: points must be positive");
    double x = static_cast<double>(p.n);
    if (family == ScalingFamily::qam) x *= std::sqrt(static_cast<double>(p.order));
    design(i, 0) = 1.0;
    design(i, 1) = std::log(x);
    target(i) = std::log(p.beta0);
  }
  const double spread = design.col(1).maxCoeff() - design.col(1).minCoeff();
  if (!(spread > 1e-12)) throw std::invalid_argument("fit_scaling_law: degenerate design, all sizes equal");
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  ScalingFit fit;
  fit.constant = std::exp(coef(0));
  fit.exponent = coef(1);
  fit.rms_residual = std::sqrt((design * coef - target).squaredNorm() / static_cast<double>(m));
  return fit;
}

}  // namespace mimo
