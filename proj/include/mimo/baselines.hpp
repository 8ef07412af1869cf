#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"

namespace mimo {

class SingularChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DetectionResult {
  CVector symbols;
  Bits bits;
  double residual_energy = 0.0;
  std::string method;
};

inline DetectionResult make_detection(const CMatrix& h, const CVector& y, CVector symbols, const Constellation& c,
                                      std::string method) {
  DetectionResult r;
  r.symbols = std::move(symbols);
  r.bits = demodulate_symbols(to_std(r.symbols), c);
  r.residual_energy = residual_energy(h, y, r.symbols);
  r.method = std::move(method);
  return r;
}

inline CVector quantize_all(const CVector& soft, const Constellation& c) {
  CVector hard(soft.size());
  for (Eigen::Index i = 0; i < soft.size(); ++i) hard(i) = quantize_to_alphabet(soft(i), c);
  return hard;
}

// Zero forcing: least-squares estimate, then per-entry hard decision.
inline DetectionResult zf_detect(const CMatrix& h, const CVector& y, const Constellation& c) {
  if (h.rows() != y.size()) throw std::invalid_argument("zf: channel rows must match y");
  Eigen::ColPivHouseholderQR<CMatrix> qr(h);
  if (qr.rank() < h.cols()) {
    throw SingularChannelError("zf: channel has rank " + std::to_string(qr.rank()) + " < " +
                               std::to_string(h.cols()));
  }
  const CVector soft = qr.solve(y);
  return make_detection(h, y, quantize_all(soft, c), c, "zf");
}

// MMSE: (H^H H + I sigma^2 / Es)^-1 H^H y, then per-entry hard decision.
inline DetectionResult mmse_detect(const CMatrix& h, const CVector& y, double sigma_sq, double symbol_energy,
                                   const Constellation& c) {
  if (h.rows() != y.size()) throw std::invalid_argument("mmse: channel rows must match y");
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("mmse: noise variance must be >= 0");
  CMatrix gram = h.adjoint() * h;
  gram.diagonal().array() += sigma_sq / symbol_energy;
  const CVector rhs = h.adjoint() * y;
  CVector soft;
  if (sigma_sq > 0.0) {
    soft = gram.ldlt().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<CMatrix> qr(gram);
    if (qr.rank() < gram.cols()) throw SingularChannelError("mmse: singular channel with zero noise");
    soft = qr.solve(rhs);
  }
  return make_detection(h, y, quantize_all(soft, c), c, "mmse");
}

}  // namespace mimo
