#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"

namespace mimo {

// x~ = T s with T = sqrt(M) * [1/2, 1/4, ..., 2^-B] (x) I_{2N}.
//
// Spins are laid out by bit plane: spin k * 2N + j carries weight
// sqrt(M) * 2^-(k+1) on real dimension j (dimensions 0..N-1 are real parts,
// N..2N-1 imaginary parts).
struct TransformSpec {
  int n_symbols = 0;
  int order = 4;
  int bits_per_axis = 1;
  std::vector<double> weights;
  RMatrix t_matrix;

  int real_dims() const noexcept { return 2 * n_symbols; }
  int spin_count() const noexcept { return real_dims() * bits_per_axis; }
};

inline TransformSpec build_transform(int n, int order) {
  if (order == 2) throw std::invalid_argument("BPSK uses spins directly and has no transform matrix");
  if (!is_valid_order(order)) throw std::invalid_argument("invalid QAM order " + std::to_string(order));
  if (n < 1) throw std::invalid_argument("transform needs at least one symbol");
  TransformSpec t;
  t.n_symbols = n;
  t.order = order;
  t.bits_per_axis = std::countr_zero(static_cast<unsigned>(order)) / 2;
  const double root_m = std::sqrt(static_cast<double>(order));
  for (int k = 1; k <= t.bits_per_axis; ++k) t.weights.push_back(root_m * std::ldexp(1.0, -k));
  const int dims = t.real_dims();
  t.t_matrix = RMatrix::Zero(dims, t.spin_count());
  for (int k = 0; k < t.bits_per_axis; ++k) {
    t.t_matrix.middleCols(k * dims, dims).diagonal().setConstant(t.weights[static_cast<std::size_t>(k)]);
  }
  return t;
}

inline RVector symbols_to_spins(const CVector& x, int order) {
  const Constellation c(order);
  if (c.is_bpsk()) {
    RVector s(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      c.label_of(x(i));
      s(i) = x(i).real();
    }
    return s;
  }
  const TransformSpec t = build_transform(static_cast<int>(x.size()), order);
  const int dims = t.real_dims();
  const RVector xr = realify_symbols(x, order);
  RVector s(t.spin_count());
  for (int j = 0; j < dims; ++j) {
    if (c.level_rank(xr(j)) < 0) throw std::invalid_argument("symbol not in QAM alphabet");
    double rest = xr(j);
    for (int k = 0; k < t.bits_per_axis; ++k) {
      const double spin = rest >= 0.0 ? 1.0 : -1.0;
      s(k * dims + j) = spin;
      rest -= t.weights[static_cast<std::size_t>(k)] * spin;
    }
    if (std::abs(rest) > 1e-9) throw std::invalid_argument("symbol level not reachable by spins");
  }
  return s;
}

inline CVector spins_to_symbols(const RVector& s, int n, int order) {
  if (order == 2) {
    if (s.size() != n) throw std::invalid_argument("BPSK spin vector must have N entries");
    return s.cast<Complex>();
  }
  const TransformSpec t = build_transform(n, order);
  if (s.size() != t.spin_count()) {
    throw std::invalid_argument("spin vector has " + std::to_string(s.size()) + " entries, expected " +
                                std::to_string(t.spin_count()));
  }
  const RVector xr = t.t_matrix * s;
  CVector x(n);
  for (int k = 0; k < n; ++k) x(k) = Complex{xr(k), xr(k + n)};
  return x;
}

// H_b(s) = -1/2 s^T J s - h^T s, with H_b(s) + offset = ||y~ - H~ T s||^2
// for every spin vector s.
struct BinaryIsingModel {
  RMatrix j_matrix;
  RVector h_vector;
  double offset = 0.0;
  int n = 0;
  int n_symbols = 0;
  int order = 2;
};

namespace detail {
inline BinaryIsingModel binary_model_from_design(const RMatrix& g, const RVector& y_real) {
  BinaryIsingModel m;
  RMatrix gram = g.transpose() * g;
  gram = 0.5 * (gram + gram.transpose()).eval();
  m.n = static_cast<int>(g.cols());
  m.j_matrix = -2.0 * gram;
  m.j_matrix.diagonal().setZero();
  m.h_vector = 2.0 * g.transpose() * y_real;
  // s_i^2 = 1 moves the Gram diagonal into the constant.
  m.offset = gram.trace() + y_real.squaredNorm();
  return m;
}
}  // namespace detail

inline BinaryIsingModel build_binary_model(const RealizedChannel& rc) {
  if (!rc.bpsk_mode) throw std::invalid_argument("QAM channels need a transform spec");
  if (rc.h_real.rows() != rc.y_real.size()) throw std::invalid_argument("realized channel shape mismatch");
  BinaryIsingModel m = detail::binary_model_from_design(rc.h_real, rc.y_real);
  m.n_symbols = m.n;
  m.order = 2;
  return m;
}

inline BinaryIsingModel build_binary_model(const RealizedChannel& rc, const TransformSpec& t) {
  if (rc.bpsk_mode) return build_binary_model(rc);
  if (rc.h_real.cols() != t.t_matrix.rows() || rc.h_real.rows() != rc.y_real.size()) {
    throw std::invalid_argument("transform spec does not match realized channel");
  }
  BinaryIsingModel m = detail::binary_model_from_design(rc.h_real * t.t_matrix, rc.y_real);
  m.n_symbols = t.n_symbols;
  m.order = t.order;
  return m;
}

inline BinaryIsingModel build_binary_model(const MimoInstance& inst) {
  const RealizedChannel rc = realify(inst.channel, inst.rx_vector, inst.order);
  if (inst.order == 2) return build_binary_model(rc);
  return build_binary_model(rc, build_transform(inst.n_tx, inst.order));
}

inline double binary_energy(const RVector& s, const BinaryIsingModel& m) {
  if (s.size() != m.n) throw std::invalid_argument("spin vector length does not match model");
  return -0.5 * s.dot(m.j_matrix * s) - m.h_vector.dot(s);
}

// Two-dimensional p-dit encoding. Only J^11 (= J^22) and J^12 (= -J^21) are
// stored; both depend on H alone, the bias on H and y.
struct PditModel {
  RMatrix j11;
  RMatrix j12;
  RMatrix h_d;  // N x 2, column 0 real, column 1 imaginary
  // Allowed values per dimension; empty means unchecked. BPSK uses {0} on
  // the imaginary dimension.
  std::vector<double> re_levels;
  std::vector<double> im_levels;

  int n() const noexcept { return static_cast<int>(h_d.rows()); }
};

// N x 2 state matrix holding (Re, Im) of each symbol.
using PditState = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline PditModel build_pdit_model(const CMatrix& h, const CVector& y) {
  if (h.rows() != y.size()) throw std::invalid_argument("pdit model: channel rows must match y");
  PditModel m;
  CMatrix gram = h.adjoint() * h;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  const CVector hy = h.adjoint() * y;
  m.j11 = -2.0 * gram.real();
  m.j12 = 2.0 * gram.imag();
  m.h_d.resize(h.cols(), 2);
  m.h_d.col(0) = 2.0 * hy.real();
  m.h_d.col(1) = 2.0 * hy.imag();
  return m;
}

inline PditModel build_pdit_model(const CMatrix& h, const CVector& y, const Constellation& c) {
  PditModel m = build_pdit_model(h, y);
  m.re_levels = c.pam_levels();
  m.im_levels = c.is_bpsk() ? std::vector<double>{0.0} : c.pam_levels();
  return m;
}

inline PditState symbols_to_pdits(const CVector& x) {
  PditState d(x.size(), 2);
  d.col(0) = x.real();
  d.col(1) = x.imag();
  return d;
}

inline CVector pdits_to_symbols(const PditState& d) {
  CVector x(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) x(i) = Complex{d(i, 0), d(i, 1)};
  return x;
}

namespace detail {
inline bool in_levels(double v, const std::vector<double>& levels) {
  if (levels.empty()) return std::isfinite(v);
  for (double l : levels) {
    if (std::abs(v - l) <= 1e-9) return true;
  }
  return false;
}
}  // namespace detail

inline void validate_pdit_state(const PditState& d, const PditModel& m) {
  if (d.rows() != m.n()) throw std::invalid_argument("p-dit state length does not match model");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (!detail::in_levels(d(i, 0), m.re_levels) || !detail::in_levels(d(i, 1), m.im_levels)) {
      throw std::invalid_argument("p-dit " + std::to_string(i) + " holds a value outside the allowed levels");
    }
  }
}

// I_i^a = h_i^a + sum_j sum_b J_ij^ab d_j^b, self term included.
inline PditState pdit_local_field(const PditState& d, const PditModel& m) {
  PditState field(d.rows(), 2);
  field.col(0) = m.h_d.col(0) + m.j11 * d.col(0) + m.j12 * d.col(1);
  field.col(1) = m.h_d.col(1) - m.j12 * d.col(0) + m.j11 * d.col(1);
  return field;
}

inline double pdit_energy(const PditState& d, const PditModel& m) {
  validate_pdit_state(d, m);
  const RVector re = d.col(0);
  const RVector im = d.col(1);
  const double linear = m.h_d.col(0).dot(re) + m.h_d.col(1).dot(im);
  const double quadratic =
      re.dot(m.j11 * re) + im.dot(m.j11 * im) + re.dot(m.j12 * im) - im.dot(m.j12 * re);
  return -(linear + 0.5 * quadratic);
}

// Energy change of moving one p-dit from `from` to `to`, given that p-dit's
// local field (self term included) and its self coupling J_ii^11. J_ii^12 is
// zero, so the diagonal block is J_ii^11 times the identity.
inline double pdit_delta_from_field(double field_re, double field_im, double self_coupling,
                                    double from_re, double from_im, double to_re, double to_im) noexcept {
  const double dre = to_re - from_re;
  const double dim = to_im - from_im;
  return -(dre * field_re + dim * field_im) - 0.5 * self_coupling * (dre * dre + dim * dim);
}

inline double pdit_delta_energy(int i, const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                                const PditState& state, const PditModel& m) {
  if (i < 0 || i >= m.n() || state.rows() != m.n()) throw std::invalid_argument("p-dit index out of range");
  if (std::abs(state(i, 0) - from(0)) > 1e-12 || std::abs(state(i, 1) - from(1)) > 1e-12) {
    throw std::invalid_argument("delta energy: 'from' is not the current value of the p-dit");
  }
  const double f_re = m.h_d(i, 0) + m.j11.row(i).dot(state.col(0)) + m.j12.row(i).dot(state.col(1));
  const double f_im = m.h_d(i, 1) - m.j12.row(i).dot(state.col(0)) + m.j11.row(i).dot(state.col(1));
  return pdit_delta_from_field(f_re, f_im, m.j11(i, i), from(0), from(1), to(0), to(1));
}

}  // namespace mimo
