#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/schedule.hpp"

namespace mimo {

enum class DetectorKind { zf, mmse, ml, bpim, dpim, oim };

inline std::string_view to_string(DetectorKind d) noexcept {
  switch (d) {
    case DetectorKind::zf: return "zf";
    case DetectorKind::mmse: return "mmse";
    case DetectorKind::ml: return "ml";
    case DetectorKind::bpim: return "bpim";
    case DetectorKind::dpim: return "dpim";
    case DetectorKind::oim: return "oim";
  }
  return "?";
}

inline DetectorKind parse_detector(std::string_view name) {
  for (DetectorKind d : {DetectorKind::zf, DetectorKind::mmse, DetectorKind::ml, DetectorKind::bpim,
                         DetectorKind::dpim, DetectorKind::oim}) {
    if (to_string(d) == name) return d;
  }
  throw std::invalid_argument("unknown detector '" + std::string(name) + "'");
}

inline bool is_heuristic(DetectorKind d) noexcept {
  return d == DetectorKind::bpim || d == DetectorKind::dpim || d == DetectorKind::oim;
}

inline Paradigm paradigm_of(DetectorKind d) {
  switch (d) {
    case DetectorKind::bpim: return Paradigm::bpim;
    case DetectorKind::dpim: return Paradigm::dpim;
    case DetectorKind::oim: return Paradigm::oim;
    default: throw std::invalid_argument("detector " + std::string(to_string(d)) + " is not an Ising machine");
  }
}

// Overrides applied on top of the scaling-law defaults of every heuristic.
struct HeuristicOverrides {
  std::optional<int> replicas;
  std::optional<int> iterations;
  std::optional<double> peak;  // beta_max, or T_max for the OIM
};

inline constexpr int kMessagesPerChannel = 14;
inline constexpr std::int64_t kReferenceBits = 86016;

struct ExperimentPlan {
  int n = 0;
  int order = 2;
  std::vector<double> ebn0_db;
  int n_channels = 0;
  int messages_per_channel = kMessagesPerChannel;
  int bits_per_message = 0;
  std::int64_t total_bits = 0;
  std::vector<DetectorKind> detectors;
  HeuristicOverrides overrides;
  std::uint64_t seed = 0;
  bool noiseless = false;

  void validate() const {
    if (n < 1) throw std::invalid_argument("plan: N must be positive");
    if (!is_valid_order(order)) throw std::invalid_argument("plan: invalid modulation order");
    if (static_cast<std::int64_t>(n_channels) * messages_per_channel * bits_per_message != total_bits) {
      throw std::invalid_argument("plan: channels x messages x bits does not equal total bits");
    }
    for (double e : ebn0_db) {
      if (!std::isfinite(e)) throw std::invalid_argument("plan: Eb/N0 values must be finite");
    }
  }
};

// Holds total bits and 14 messages per channel fixed and derives the channel
// count; BPSK at 86016 bits reproduces 6144/N channels.
inline ExperimentPlan plan_experiment(int n, int order, std::vector<double> ebn0_db, std::int64_t total_bits,
                                      std::uint64_t seed, int messages_per_channel = kMessagesPerChannel) {
  if (n < 1) throw std::invalid_argument("plan: N must be positive");
  const Constellation c(order);
  if (messages_per_channel < 1) throw std::invalid_argument("plan: messages per channel must be positive");
  if (total_bits < 1) throw std::invalid_argument("plan: total bits must be positive");
  const std::int64_t bits_per_message = static_cast<std::int64_t>(n) * c.bits_per_symbol();
  const std::int64_t block = bits_per_message * messages_per_channel;
  if (total_bits % block != 0) {
    const std::int64_t lower = std::max<std::int64_t>(block, (total_bits / block) * block);
    const std::int64_t upper = (total_bits / block + 1) * block;
    throw std::invalid_argument("plan: " + std::to_string(total_bits) + " bits do not split into whole channels of " +
                                std::to_string(messages_per_channel) + " messages x " +
                                std::to_string(bits_per_message) + " bits; nearest valid totals are " +
                                std::to_string(lower) + " and " + std::to_string(upper));
  }
  ExperimentPlan p;
  p.n = n;
  p.order = order;
  p.ebn0_db = std::move(ebn0_db);
  p.messages_per_channel = messages_per_channel;
  p.bits_per_message = static_cast<int>(bits_per_message);
  p.total_bits = total_bits;
  p.n_channels = static_cast<int>(total_bits / block);
  p.seed = seed;
  return p;
}

inline ParadigmParameters resolve_parameters(const ExperimentPlan& plan, DetectorKind d) {
  ParadigmParameters params = default_parameters(paradigm_of(d), plan.n, plan.order);
  if (plan.overrides.replicas) params.replicas = *plan.overrides.replicas;
  if (plan.overrides.iterations) params.schedule.n_iterations = *plan.overrides.iterations;
  if (plan.overrides.peak) params.schedule.peak = *plan.overrides.peak;
  return params;
}

}  // namespace mimo
