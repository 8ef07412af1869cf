#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo {

using Complex = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

inline bool is_valid_order(int order) noexcept {
  if (order == 2) return true;
  if (order < 4 || !std::has_single_bit(static_cast<unsigned>(order))) return false;
  return std::countr_zero(static_cast<unsigned>(order)) % 2 == 0;
}

inline unsigned gray_encode(unsigned rank) noexcept { return rank ^ (rank >> 1); }

inline unsigned gray_decode(unsigned code) noexcept {
  unsigned rank = code;
  for (unsigned shift = 1; shift < 32; shift <<= 1) rank ^= rank >> shift;
  return rank;
}

// BPSK or square M-QAM with a per-axis binary-reflected Gray labelling.
//
// A symbol label is the integer formed by its bits, most significant first.
// For QAM the first half of the label selects the real PAM level and the
// second half the imaginary one; within an axis the b-bit string g sits at
// rank gray_decode(g), i.e. level 2*rank - (L - 1). BPSK maps 0 -> -1 and
// 1 -> +1. alphabet()[label] is the point carrying that label.
class Constellation {
 public:
  explicit Constellation(int order) : order_(order) {
    if (!is_valid_order(order)) {
      throw std::invalid_argument("constellation order must be 2 or an even power of two, got " +
                                  std::to_string(order));
    }
    bits_per_symbol_ = std::countr_zero(static_cast<unsigned>(order));
    if (order == 2) {
      levels_ = {-1.0, 1.0};
      alphabet_ = {Complex{-1.0, 0.0}, Complex{1.0, 0.0}};
    } else {
      const int side = side_length();
      const int half = bits_per_symbol_ / 2;
      levels_.resize(static_cast<std::size_t>(side));
      for (int r = 0; r < side; ++r) levels_[static_cast<std::size_t>(r)] = 2.0 * r - (side - 1);
      alphabet_.resize(static_cast<std::size_t>(order));
      for (unsigned label = 0; label < static_cast<unsigned>(order); ++label) {
        const unsigned re_code = label >> half;
        const unsigned im_code = label & ((1u << half) - 1u);
        alphabet_[label] = Complex{levels_[gray_decode(re_code)], levels_[gray_decode(im_code)]};
      }
    }
    double power = 0.0;
    for (const Complex& x : alphabet_) power += std::norm(x);
    symbol_energy_ = power / order;
  }

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return bits_per_symbol_; }
  bool is_bpsk() const noexcept { return order_ == 2; }
  // Number of PAM levels per axis (2 for BPSK, on the real axis only).
  int side_length() const noexcept {
    return order_ == 2 ? 2 : 1 << (bits_per_symbol_ / 2);
  }
  double symbol_energy() const noexcept { return symbol_energy_; }
  const std::vector<Complex>& alphabet() const noexcept { return alphabet_; }
  const std::vector<double>& pam_levels() const noexcept { return levels_; }

  // Rank of a PAM level on one axis, or -1 when the value is not a level.
  int level_rank(double value) const noexcept {
    const double r = (value + (side_length() - 1)) / 2.0;
    const double rounded = std::round(r);
    if (!(std::abs(r - rounded) <= 1e-9) || rounded < 0 || rounded >= side_length()) return -1;
    return static_cast<int>(rounded);
  }

  // Label of an alphabet point; throws if the point is off-alphabet.
  unsigned label_of(Complex x) const {
    if (is_bpsk()) {
      const int r = level_rank(x.real());
      if (r < 0 || std::abs(x.imag()) > 1e-9) throw std::invalid_argument("symbol not in BPSK alphabet");
      return static_cast<unsigned>(r);
    }
    const int re = level_rank(x.real());
    const int im = level_rank(x.imag());
    if (re < 0 || im < 0) throw std::invalid_argument("symbol not in QAM alphabet");
    const int half = bits_per_symbol_ / 2;
    return (gray_encode(static_cast<unsigned>(re)) << half) | gray_encode(static_cast<unsigned>(im));
  }

  // Nearest PAM level, ties toward the more positive level.
  double quantize_axis(double v) const noexcept {
    const int side = side_length();
    double r = std::floor((v + (side - 1)) / 2.0 + 0.5);
    if (r < 0) r = 0;
    if (r > side - 1) r = side - 1;
    return 2.0 * r - (side - 1);
  }

 private:
  int order_;
  int bits_per_symbol_ = 1;
  double symbol_energy_ = 0.0;
  std::vector<double> levels_;
  std::vector<Complex> alphabet_;
};

inline Constellation build_constellation(int order) { return Constellation(order); }

inline std::vector<Complex> modulate_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_symbol());
  if (bits.size() % k != 0) {
    throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                " is not a multiple of bits per symbol " + std::to_string(k));
  }
  std::vector<Complex> symbols(bits.size() / k);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    unsigned label = 0;
    for (std::size_t b = 0; b < k; ++b) label = (label << 1) | (bits[s * k + b] & 1u);
    symbols[s] = c.alphabet()[label];
  }
  return symbols;
}

inline Bits demodulate_symbols(std::span<const Complex> symbols, const Constellation& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_symbol());
  Bits bits(symbols.size() * k);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const unsigned label = c.label_of(symbols[s]);
    for (std::size_t b = 0; b < k; ++b) {
      bits[s * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1u);
    }
  }
  return bits;
}

inline Complex quantize_to_alphabet(Complex z, const Constellation& c) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("cannot quantize a non-finite value");
  }
  if (c.is_bpsk()) return {c.quantize_axis(z.real()), 0.0};
  return {c.quantize_axis(z.real()), c.quantize_axis(z.imag())};
}

}  // namespace mimo
