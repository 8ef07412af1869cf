#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "mimo/schedule.hpp"
#include "mimo/seed.hpp"

namespace mimo {

inline std::uint64_t replica_seed(std::uint64_t seed, int replica) noexcept {
  return derive_seed(seed, SeedRole::replica, {static_cast<std::uint64_t>(replica)});
}

// Runs `count` tasks on up to `threads` workers. Task i writes only to its
// own slot, so outcomes never depend on scheduling.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Independent replicas, each seeded from (seed, replica index). The result is
// the lowest best-ever energy; ties go to the lower replica index.
template <class Kernel>
auto run_replicated(Kernel&& kernel, int replicas, std::uint64_t seed, int threads = 1) {
  using Result = std::invoke_result_t<Kernel&, std::uint64_t>;
  using State = decltype(std::declval<Result>().best_state);
  if (replicas < 1) throw std::invalid_argument("need at least one replica");
  std::vector<Result> results(static_cast<std::size_t>(replicas));
  parallel_for(replicas, threads, [&](int r) { results[static_cast<std::size_t>(r)] = kernel(replica_seed(seed, r)); });

  SolveOutcome<State> out;
  out.replica_final_energies.reserve(results.size());
  std::size_t best = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    out.replica_final_energies.push_back(results[r].final_energy);
    if (results[r].best_energy < results[best].best_energy) best = r;
  }
  out.best_state = std::move(results[best].best_state);
  out.best_energy = results[best].best_energy;
  out.best_replica = static_cast<int>(best);
  out.best_iteration = results[best].best_iteration;
  return out;
}

}  // namespace mimo
