#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimo/baselines.hpp"
#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"

namespace mimo {

class SearchBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SphereDecoderOptions {
  // Refuse instances whose full search space M^N exceeds 2^this.
  double max_search_space_log2 = 48.0;
  // Abort if the depth-first search visits more nodes than this.
  std::uint64_t max_nodes = std::uint64_t{1} << 36;
};

struct SphereDecoderStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
};

inline double search_space_log2(int n_tx, const Constellation& c) {
  return static_cast<double>(n_tx) * c.bits_per_symbol();
}

// Exact ML detection by depth-first Schnorr-Euchner enumeration.
//
// Works on the real-valued model: ||y - Hx||^2 = ||z - R x~||^2 + const with
// H~ = QR and z = Q^T y~. The radius starts infinite and shrinks to the best
// leaf found so far; a subtree is pruned only when its partial distance is at
// least the current best, so the returned point is the exact argmin.
inline DetectionResult ml_exact(const CMatrix& h, const CVector& y, const Constellation& c,
                                const SphereDecoderOptions& opts = {}, SphereDecoderStats* stats = nullptr) {
  if (h.rows() != y.size()) throw std::invalid_argument("ml: channel rows must match y");
  if (h.rows() < h.cols()) throw std::invalid_argument("ml: needs n_rx >= n_tx");
  const double space = search_space_log2(static_cast<int>(h.cols()), c);
  if (space > opts.max_search_space_log2) {
    throw SearchBudgetError("ml: search space 2^" + std::to_string(space) + " exceeds budget 2^" +
                            std::to_string(opts.max_search_space_log2));
  }
  const RealizedChannel rc = realify(h, y, c.order());
  const Eigen::Index n = rc.h_real.cols();
  Eigen::HouseholderQR<RMatrix> qr(rc.h_real);
  const RMatrix r = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
  const RVector z = (qr.householderQ().transpose() * rc.y_real).head(n);
  const std::vector<double>& levels = c.pam_levels();
  const auto n_levels = static_cast<int>(levels.size());

  // Per depth: candidate order (closest first), cursor, and accumulated cost.
  std::vector<std::vector<int>> order(static_cast<std::size_t>(n), std::vector<int>(levels.size()));
  std::vector<int> cursor(static_cast<std::size_t>(n), 0);
  std::vector<double> center(static_cast<std::size_t>(n), 0.0);
  std::vector<double> partial(static_cast<std::size_t>(n) + 1, 0.0);
  RVector x = RVector::Zero(n);
  RVector best_x = RVector::Zero(n);
  double best = std::numeric_limits<double>::infinity();
  SphereDecoderStats local;

  // partial[k + 1] is the cost of the fixed coordinates k + 1 .. n - 1.
  auto open_level = [&](Eigen::Index k) {
    double acc = z(k);
    for (Eigen::Index j = k + 1; j < n; ++j) acc -= r(k, j) * x(j);
    const double cen = acc / r(k, k);
    center[static_cast<std::size_t>(k)] = cen;
    auto& ord = order[static_cast<std::size_t>(k)];
    for (int l = 0; l < n_levels; ++l) ord[static_cast<std::size_t>(l)] = l;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return std::abs(levels[static_cast<std::size_t>(a)] - cen) < std::abs(levels[static_cast<std::size_t>(b)] - cen);
    });
    cursor[static_cast<std::size_t>(k)] = 0;
  };

  Eigen::Index k = n - 1;
  partial[static_cast<std::size_t>(n)] = 0.0;
  open_level(k);
  while (true) {
    const auto ku = static_cast<std::size_t>(k);
    if (cursor[ku] >= n_levels) {
      if (k == n - 1) break;
      ++k;
      continue;
    }
    const double level = levels[static_cast<std::size_t>(order[ku][static_cast<std::size_t>(cursor[ku])])];
    ++cursor[ku];
    const double diff = r(k, k) * (level - center[ku]);
    const double cost = partial[ku + 1] + diff * diff;
    if (++local.nodes > opts.max_nodes) {
      throw SearchBudgetError("ml: node budget of " + std::to_string(opts.max_nodes) + " exceeded");
    }
    if (cost >= best) {
      // Remaining candidates at this depth are farther from the center.
      cursor[ku] = n_levels;
      continue;
    }
    x(k) = level;
    if (k == 0) {
      ++local.leaves;
      best = cost;
      best_x = x;
      continue;
    }
    partial[ku] = cost;
    --k;
    open_level(k);
  }
  if (stats != nullptr) *stats = local;

  CVector symbols(h.cols());
  if (c.is_bpsk()) {
    for (Eigen::Index i = 0; i < h.cols(); ++i) symbols(i) = Complex{best_x(i), 0.0};
  } else {
    for (Eigen::Index i = 0; i < h.cols(); ++i) symbols(i) = Complex{best_x(i), best_x(i + h.cols())};
  }
  return make_detection(h, y, std::move(symbols), c, "ml");
}

// Brute-force argmin of ||y - Hx||^2 over the whole alphabet product.
inline DetectionResult ml_exhaustive(const CMatrix& h, const CVector& y, const Constellation& c,
                                     double max_search_space_log2 = 24.0) {
  if (h.rows() != y.size()) throw std::invalid_argument("ml: channel rows must match y");
  const int n = static_cast<int>(h.cols());
  if (search_space_log2(n, c) > max_search_space_log2) {
    throw SearchBudgetError("exhaustive ML refused: search space too large");
  }
  const auto& alphabet = c.alphabet();
  const auto m = alphabet.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = alphabet[0];
  CVector best_x = x;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    const double e = (y - h * x).squaredNorm();
    if (e < best) {
      best = e;
      best_x = x;
    }
    int pos = 0;
    while (pos < n) {
      auto& d = idx[static_cast<std::size_t>(pos)];
      if (++d < m) {
        x(pos) = alphabet[d];
        break;
      }
      d = 0;
      x(pos) = alphabet[0];
      ++pos;
    }
    if (pos == n) break;
  }
  return make_detection(h, y, std::move(best_x), c, "ml_exhaustive");
}

}  // namespace mimo
