#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mimo {

// Stream roles mixed into derived seeds so that channel, message, noise and
// solver draws never share a stream.
enum class SeedRole : std::uint64_t {
  channel = 1,
  message = 2,
  noise = 3,
  solver = 4,
  replica = 5,
  beta_sweep = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: the master seed is hashed, then each
// coordinate (role first, then the indices in order) is folded in with one
// splitmix64 round. Distinct coordinate tuples give unrelated 64-bit seeds.
inline std::uint64_t derive_seed(std::uint64_t master, SeedRole role,
                                 std::initializer_list<std::uint64_t> indices = {}) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(role) * 0xd1b54a32d192ed03ULL));
  for (std::uint64_t idx : indices) h = splitmix64(h ^ idx);
  return h;
}

// Thin wrapper over mt19937_64 with the two draws the simulators need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(engine_); }

  std::uint64_t bits() noexcept { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mimo
