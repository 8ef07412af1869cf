#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "mimo/constellation.hpp"
#include "mimo/seed.hpp"

namespace mimo {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

struct SeedInfo {
  std::uint64_t channel = 0;
  std::uint64_t message = 0;
  std::uint64_t noise = 0;
};

// One detection problem: y = H x0 + n.
struct MimoInstance {
  int n_rx = 0;
  int n_tx = 0;
  int order = 2;
  CMatrix channel;
  CVector tx_symbols;
  Bits tx_bits;
  CVector rx_vector;
  double sigma_sq = 0.0;
  double ebn0_db = 0.0;
  SeedInfo seeds;
};

// Real-valued stacking of a complex model. QAM uses [Re -Im; Im Re] with
// x~ = [Re x; Im x]; BPSK keeps x real and stacks [Re H; Im H].
struct RealizedChannel {
  RMatrix h_real;
  RVector y_real;
  bool bpsk_mode = false;
};

// i.i.d. Rayleigh fading, H_ij ~ CN(0, 1).
inline CMatrix generate_channel(int n_rx, int n_tx, std::uint64_t seed) {
  if (n_tx < 1 || n_rx < n_tx) {
    throw std::invalid_argument("channel shape requires n_rx >= n_tx >= 1");
  }
  Rng rng(seed);
  const double scale = std::sqrt(0.5);
  CMatrix h(n_rx, n_tx);
  for (int j = 0; j < n_tx; ++j) {
    for (int i = 0; i < n_rx; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      h(i, j) = Complex{scale * re, scale * im};
    }
  }
  return h;
}

inline double noise_sigma_sq(int n_tx, double symbol_energy, int order, double ebn0_db) {
  if (!std::isfinite(ebn0_db)) throw std::invalid_argument("Eb/N0 must be finite");
  if (!is_valid_order(order)) throw std::invalid_argument("invalid modulation order");
  const double bits = std::log2(static_cast<double>(order));
  return n_tx * symbol_energy / (bits * std::pow(10.0, ebn0_db / 10.0));
}

// sigma_sq is the total variance of each complex noise sample.
inline CVector transmit(const CMatrix& h, const CVector& x0, double sigma_sq, std::uint64_t seed) {
  if (h.cols() != x0.size()) {
    throw std::invalid_argument("transmit: channel has " + std::to_string(h.cols()) +
                                " columns but message has " + std::to_string(x0.size()) + " symbols");
  }
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("transmit: noise variance must be >= 0");
  CVector y = h * x0;
  if (sigma_sq == 0.0) return y;
  Rng rng(seed);
  const double scale = std::sqrt(sigma_sq / 2.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    y(i) += Complex{scale * re, scale * im};
  }
  return y;
}

inline RealizedChannel realify(const CMatrix& h, const CVector& y, int order) {
  if (h.rows() != y.size()) throw std::invalid_argument("realify: channel rows must match y");
  const Eigen::Index nr = h.rows();
  const Eigen::Index nt = h.cols();
  RealizedChannel rc;
  rc.bpsk_mode = order == 2;
  rc.y_real.resize(2 * nr);
  rc.y_real << y.real(), y.imag();
  if (rc.bpsk_mode) {
    rc.h_real.resize(2 * nr, nt);
    rc.h_real << h.real(), h.imag();
  } else {
    rc.h_real.resize(2 * nr, 2 * nt);
    rc.h_real << h.real(), -h.imag(), h.imag(), h.real();
  }
  return rc;
}

// Stacked real vector matching realify's column layout.
inline RVector realify_symbols(const CVector& x, int order) {
  if (order == 2) return x.real();
  RVector xr(2 * x.size());
  xr << x.real(), x.imag();
  return xr;
}

inline Bits random_bits(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  Bits bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng.bits();
    bits[i] = static_cast<std::uint8_t>(word & 1u);
    word >>= 1;
  }
  return bits;
}

inline CVector to_vector(const std::vector<Complex>& v) {
  return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<Complex> to_std(const CVector& v) {
  return {v.data(), v.data() + v.size()};
}

// Square N x N instance built from explicit channel, message and noise seeds.
inline MimoInstance make_instance(int n, const Constellation& c, double ebn0_db, const SeedInfo& seeds,
                                  bool noiseless = false) {
  MimoInstance inst;
  inst.n_rx = n;
  inst.n_tx = n;
  inst.order = c.order();
  inst.ebn0_db = ebn0_db;
  inst.seeds = seeds;
  inst.channel = generate_channel(n, n, seeds.channel);
  inst.tx_bits = random_bits(static_cast<std::size_t>(n) * c.bits_per_symbol(), seeds.message);
  inst.tx_symbols = to_vector(modulate_bits(inst.tx_bits, c));
  inst.sigma_sq = noiseless ? 0.0 : noise_sigma_sq(n, c.symbol_energy(), c.order(), ebn0_db);
  inst.rx_vector = transmit(inst.channel, inst.tx_symbols, inst.sigma_sq, seeds.noise);
  return inst;
}

inline double residual_energy(const CMatrix& h, const CVector& y, const CVector& x) {
  return (y - h * x).squaredNorm();
}

}  // namespace mimo
