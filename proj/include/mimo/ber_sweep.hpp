#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/baselines.hpp"
#include "mimo/bpim.hpp"
#include "mimo/channel.hpp"
#include "mimo/dpim.hpp"
#include "mimo/ising_map.hpp"
#include "mimo/oim.hpp"
#include "mimo/plan.hpp"
#include "mimo/replicas.hpp"
#include "mimo/sphere_decoder.hpp"
#include "mimo/stats.hpp"

namespace mimo {

struct BerPoint {
  std::string detector;
  int n = 0;
  int order = 2;
  double ebn0_db = 0.0;
  std::int64_t bits_transmitted = 0;
  std::int64_t bit_errors = 0;
  double ber = 0.0;
  double ber_upper_95 = 0.0;
  int replicas = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::int64_t failures = 0;
};

struct SweepResult {
  std::vector<BerPoint> points;  // detector-major, Eb/N0 in plan order
  // Instances where some detector reached a strictly lower residual than the
  // sphere decoder (always zero when the decoder is exact).
  std::int64_t ml_optimality_violations = 0;
};

inline void finalize_point(BerPoint& p) {
  p.ber = p.bits_transmitted > 0 ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_transmitted) : 0.0;
  if (p.bits_transmitted == 0) {
    p.ber_upper_95 = 1.0;
  } else if (p.bit_errors == 0) {
    p.ber_upper_95 = ber_upper_bound(p.bits_transmitted, 0.95);
  } else {
    p.ber_upper_95 = binomial_upper(p.bit_errors, p.bits_transmitted, 0.95);
  }
}

// Runs one detector on one instance and returns its hard symbol decisions.
inline CVector detect_symbols(DetectorKind kind, const MimoInstance& inst, const Constellation& c,
                              const ParadigmParameters* params, std::uint64_t seed) {
  switch (kind) {
    case DetectorKind::zf:
      return zf_detect(inst.channel, inst.rx_vector, c).symbols;
    case DetectorKind::mmse:
      return mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c).symbols;
    case DetectorKind::ml:
      return ml_exact(inst.channel, inst.rx_vector, c).symbols;
    case DetectorKind::bpim: {
      const BinaryIsingModel model = build_binary_model(inst);
      const auto out = bpim_solve(model, make_config(*params, seed));
      return spins_to_symbols(out.best_state, inst.n_tx, inst.order);
    }
    case DetectorKind::dpim: {
      const PditModel model = build_pdit_model(inst.channel, inst.rx_vector, c);
      const auto out = dpim_solve(model, c, make_config(*params, seed));
      return pdits_to_symbols(out.best_state);
    }
    case DetectorKind::oim: {
      const BinaryIsingModel model = build_binary_model(inst);
      const auto out = oim_solve(model, make_config(*params, seed));
      return spins_to_symbols(out.best_state, inst.n_tx, inst.order);
    }
  }
  throw std::logic_error("unhandled detector");
}

inline std::int64_t hamming(const Bits& a, const Bits& b) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

// Channel c carries messages m = 0..messages-1; each message is sent at
// every Eb/N0 of the plan with the same unit noise draw scaled by sigma.
inline SweepResult run_ber_sweep(const ExperimentPlan& plan, int threads = 1, std::ostream* log = &std::cerr) {
  plan.validate();
  const Constellation c(plan.order);
  const std::size_t n_det = plan.detectors.size();
  const std::size_t n_snr = plan.ebn0_db.size();

  std::vector<ParadigmParameters> params(n_det);
  for (std::size_t d = 0; d < n_det; ++d) {
    if (is_heuristic(plan.detectors[d])) params[d] = resolve_parameters(plan, plan.detectors[d]);
  }
  std::size_t ml_index = n_det;
  for (std::size_t d = 0; d < n_det; ++d) {
    if (plan.detectors[d] == DetectorKind::ml) ml_index = d;
  }

  struct Tally {
    std::vector<std::int64_t> errors, failures;
    std::int64_t violations = 0;
  };
  std::vector<Tally> tallies(static_cast<std::size_t>(plan.n_channels));
  std::mutex log_mutex;

  parallel_for(plan.n_channels, threads, [&](int ch) {
    Tally& t = tallies[static_cast<std::size_t>(ch)];
    t.errors.assign(n_det * n_snr, 0);
    t.failures.assign(n_det * n_snr, 0);
    const auto chu = static_cast<std::uint64_t>(ch);
    const CMatrix h = generate_channel(plan.n, plan.n, derive_seed(plan.seed, SeedRole::channel, {chu}));
    std::vector<double> residual(n_det);
    for (int m = 0; m < plan.messages_per_channel; ++m) {
      const auto mu = static_cast<std::uint64_t>(m);
      MimoInstance inst;
      inst.n_rx = inst.n_tx = plan.n;
      inst.order = plan.order;
      inst.channel = h;
      inst.seeds = {derive_seed(plan.seed, SeedRole::channel, {chu}),
                    derive_seed(plan.seed, SeedRole::message, {chu, mu}),
                    derive_seed(plan.seed, SeedRole::noise, {chu, mu})};
      inst.tx_bits = random_bits(static_cast<std::size_t>(plan.bits_per_message), inst.seeds.message);
      inst.tx_symbols = to_vector(modulate_bits(inst.tx_bits, c));
      for (std::size_t e = 0; e < n_snr; ++e) {
        inst.ebn0_db = plan.ebn0_db[e];
        inst.sigma_sq = plan.noiseless ? 0.0 : noise_sigma_sq(plan.n, c.symbol_energy(), plan.order, inst.ebn0_db);
        inst.rx_vector = transmit(h, inst.tx_symbols, inst.sigma_sq, inst.seeds.noise);
        for (std::size_t d = 0; d < n_det; ++d) {
          const std::uint64_t seed = derive_seed(plan.seed, SeedRole::solver, {chu, mu, e, d});
          const std::size_t slot = d * n_snr + e;
          try {
            const CVector x = detect_symbols(plan.detectors[d], inst, c, &params[d], seed);
            const Bits bits = demodulate_symbols(to_std(x), c);
            t.errors[slot] += hamming(bits, inst.tx_bits);
            residual[d] = residual_energy(h, inst.rx_vector, x);
          } catch (const std::exception& ex) {
            t.errors[slot] += plan.bits_per_message;
            t.failures[slot] += 1;
            residual[d] = std::numeric_limits<double>::infinity();
            if (log != nullptr) {
              std::lock_guard lock(log_mutex);
              *log << "detector " << to_string(plan.detectors[d]) << " failed on channel " << ch << " message "
                   << m << " at " << inst.ebn0_db << " dB: " << ex.what() << "\n";
            }
          }
        }
        if (ml_index < n_det) {
          const double ml = residual[ml_index];
          for (std::size_t d = 0; d < n_det; ++d) {
            if (residual[d] < ml * (1.0 - 1e-12) - 1e-12) ++t.violations;
          }
        }
      }
    }
  });

  SweepResult result;
  for (std::size_t d = 0; d < n_det; ++d) {
    for (std::size_t e = 0; e < n_snr; ++e) {
      BerPoint p;
      p.detector = std::string(to_string(plan.detectors[d]));
      p.n = plan.n;
      p.order = plan.order;
      p.ebn0_db = plan.ebn0_db[e];
      p.seed = plan.seed;
      if (is_heuristic(plan.detectors[d])) {
        p.replicas = params[d].replicas;
        p.iterations = params[d].schedule.n_iterations;
      }
      for (const Tally& t : tallies) {
        p.bit_errors += t.errors[d * n_snr + e];
        p.failures += t.failures[d * n_snr + e];
      }
      p.bits_transmitted = plan.total_bits;
      finalize_point(p);
      result.points.push_back(p);
    }
  }
  for (const Tally& t : tallies) result.ml_optimality_violations += t.violations;
  return result;
}

inline const BerPoint* find_point(const SweepResult& r, std::string_view detector, double ebn0_db) {
  for (const BerPoint& p : r.points) {
    if (p.detector == detector && std::abs(p.ebn0_db - ebn0_db) < 1e-9) return &p;
  }
  return nullptr;
}

}  // namespace mimo
