#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mimo/baselines.hpp"
#include "mimo/bpim.hpp"
#include "mimo/sphere_decoder.hpp"
#include "mimo/stats.hpp"

using namespace mimo;

namespace {

MimoInstance instance(int n, int order, double ebn0, std::uint64_t k) {
  return make_instance(n, Constellation(order), ebn0,
                       {derive_seed(k, SeedRole::channel), derive_seed(k, SeedRole::message),
                        derive_seed(k, SeedRole::noise)});
}

long bit_errors(const Bits& a, const Bits& b) {
  long e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
  return e;
}

// MMSE through the stacked real model and an explicit inverse.
CVector mmse_oracle(const MimoInstance& inst, const Constellation& c) {
  const RealizedChannel rc = realify(inst.channel, inst.rx_vector, 4);
  const Eigen::Index n = rc.h_real.cols();
  const RMatrix a = rc.h_real.transpose() * rc.h_real +
                    RMatrix::Identity(n, n) * (inst.sigma_sq / c.symbol_energy());
  const RVector soft = a.inverse() * rc.h_real.transpose() * rc.y_real;
  CVector out(inst.n_tx);
  for (int i = 0; i < inst.n_tx; ++i) out(i) = quantize_to_alphabet({soft(i), soft(i + inst.n_tx)}, c);
  return out;
}

bool in_alphabet(const CVector& x, const Constellation& c) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    bool found = false;
    for (const Complex& p : c.alphabet()) found = found || p == x(i);
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST(Zf, ScalarExample) {
  const CMatrix h = CMatrix::Constant(1, 1, 2.0);
  const CVector y = CVector::Constant(1, 6.1);
  const DetectionResult r = zf_detect(h, y, Constellation(2));
  EXPECT_EQ(r.symbols(0), Complex(1.0, 0.0));
  EXPECT_EQ(r.method, "zf");
  EXPECT_EQ(r.bits, Bits{1});
  EXPECT_NEAR(r.residual_energy, 4.1 * 4.1, 1e-12);
}

TEST(Zf, NoiselessInversionIsExact) {
  for (int order : {2, 4, 16, 64}) {
    for (std::uint64_t k = 0; k < 20; ++k) {
      const MimoInstance inst = make_instance(6, Constellation(order), 0.0, {k, k + 1, k + 2}, true);
      EXPECT_EQ(zf_detect(inst.channel, inst.rx_vector, Constellation(order)).symbols, inst.tx_symbols);
    }
  }
}

TEST(Zf, RejectsSingularChannel) {
  CMatrix h(2, 2);
  h << 1, 2, 2, 4;
  EXPECT_THROW(zf_detect(h, CVector::Ones(2), Constellation(4)), SingularChannelError);
  EXPECT_THROW(mmse_detect(h, CVector::Ones(2), 0.0, 2.0, Constellation(4)), SingularChannelError);
  EXPECT_NO_THROW(mmse_detect(h, CVector::Ones(2), 0.1, 2.0, Constellation(4)));
}

TEST(Mmse, ScalarExample) {
  const CMatrix h = CMatrix::Ones(1, 1);
  const CVector y = CVector::Constant(1, Complex(1.0, 1.0));
  // (1 + 2/2)^-1 (1 + i) = (1 + i) / 2, quantized to 1 + i.
  EXPECT_EQ(mmse_detect(h, y, 2.0, 2.0, Constellation(4)).symbols(0), Complex(1.0, 1.0));
  EXPECT_THROW(mmse_detect(h, y, -1.0, 2.0, Constellation(4)), std::invalid_argument);
}

TEST(Mmse, DegeneratesToZfWithoutNoise) {
  for (int order : {2, 4, 16}) {
    const Constellation c(order);
    for (std::uint64_t k = 0; k < 50; ++k) {
      const MimoInstance inst = instance(5, order, 3.0, k);
      EXPECT_EQ(mmse_detect(inst.channel, inst.rx_vector, 0.0, c.symbol_energy(), c).symbols,
                zf_detect(inst.channel, inst.rx_vector, c).symbols);
    }
  }
}

TEST(Mmse, MatchesIndependentOracle) {
  const Constellation c(2);
  for (double ebn0 : {4.0, 8.0, 12.0}) {
    long errors = 0, oracle_errors = 0, bits = 0, disagreements = 0;
    for (std::uint64_t k = 0; bits < 100000; ++k) {
      const MimoInstance inst = instance(16, 2, ebn0, k);
      const DetectionResult r = mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c);
      const CVector o = mmse_oracle(inst, c);
      disagreements += r.symbols != o;
      errors += bit_errors(r.bits, inst.tx_bits);
      oracle_errors += bit_errors(demodulate_symbols(to_std(o), c), inst.tx_bits);
      bits += static_cast<long>(inst.tx_bits.size());
    }
    const Interval ci = binomial_interval(oracle_errors, bits);
    EXPECT_TRUE(ci.contains(static_cast<double>(errors) / bits)) << ebn0;
    EXPECT_LE(disagreements, 2) << ebn0;
  }
}

TEST(Linear, OutputsStayInAlphabet) {
  for (int order : {2, 4, 16, 64}) {
    const Constellation c(order);
    for (std::uint64_t k = 0; k < 30; ++k) {
      const MimoInstance inst = instance(8, order, -2.0, k);
      EXPECT_TRUE(in_alphabet(zf_detect(inst.channel, inst.rx_vector, c).symbols, c));
      EXPECT_TRUE(
          in_alphabet(mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c).symbols, c));
    }
  }
}

TEST(Linear, ZfNoBetterThanMmse) {
  const Constellation c(4);
  long zf = 0, mmse = 0, bits = 0;
  for (std::uint64_t k = 0; bits < 100000; ++k) {
    const MimoInstance inst = instance(8, 4, 16.0, k);
    zf += bit_errors(zf_detect(inst.channel, inst.rx_vector, c).bits, inst.tx_bits);
    mmse += bit_errors(mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c).bits,
                       inst.tx_bits);
    bits += static_cast<long>(inst.tx_bits.size());
  }
  EXPECT_GE(zf, mmse);
}

TEST(Ml, ScalarExample) {
  const CMatrix h = CMatrix::Ones(1, 1);
  EXPECT_EQ(ml_exact(h, CVector::Constant(1, 0.3), Constellation(2)).symbols(0), Complex(1.0, 0.0));
  EXPECT_EQ(ml_exact(h, CVector::Constant(1, -0.3), Constellation(2)).symbols(0), Complex(-1.0, 0.0));
  EXPECT_EQ(ml_exhaustive(h, CVector::Constant(1, 0.3), Constellation(2)).symbols(0), Complex(1.0, 0.0));
}

TEST(Ml, SphereDecoderMatchesExhaustive) {
  struct Shape {
    int n, order;
  };
  const Shape shapes[] = {{16, 2}, {8, 4}, {4, 16}, {2, 64}, {5, 4}, {11, 2}, {3, 16}};
  int checked = 0;
  for (std::uint64_t k = 0; k < 140; ++k) {
    const Shape s = shapes[k % 7];
    const double ebn0 = -2.0 + static_cast<double>(k % 5) * 4.0;
    const MimoInstance inst = instance(s.n, s.order, ebn0, 1000 + k);
    const Constellation c(s.order);
    const DetectionResult sd = ml_exact(inst.channel, inst.rx_vector, c);
    const DetectionResult ex = ml_exhaustive(inst.channel, inst.rx_vector, c);
    EXPECT_EQ(sd.symbols, ex.symbols) << s.n << "x" << s.order << " k=" << k;
    EXPECT_NEAR(sd.residual_energy, ex.residual_energy, 1e-9 * (1.0 + ex.residual_energy));
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(Ml, NoDetectorBeatsTheSphereDecoder) {
  for (int order : {2, 4, 16}) {
    const Constellation c(order);
    const int n = order == 16 ? 6 : 10;
    for (std::uint64_t k = 0; k < 30; ++k) {
      const MimoInstance inst = instance(n, order, 2.0 + static_cast<double>(k % 4) * 3.0, k);
      const double ml = ml_exact(inst.channel, inst.rx_vector, c).residual_energy;
      const double tol = 1e-9 * (1.0 + ml);
      EXPECT_LE(ml, zf_detect(inst.channel, inst.rx_vector, c).residual_energy + tol);
      EXPECT_LE(ml, mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c).residual_energy +
                        tol);
      const BinaryIsingModel bm = build_binary_model(inst);
      SolverConfig cfg = make_config(default_parameters(Paradigm::bpim, n, order), k);
      cfg.replicas = 8;
      const auto b = bpim_solve(bm, cfg);
      EXPECT_LE(ml, residual_energy(inst.channel, inst.rx_vector, spins_to_symbols(b.best_state, n, order)) + tol);
    }
  }
}

TEST(Ml, BudgetGuards) {
  const MimoInstance big = instance(25, 4, 10.0, 1);
  EXPECT_THROW(ml_exact(big.channel, big.rx_vector, Constellation(4)), SearchBudgetError);
  SphereDecoderOptions opts;
  opts.max_search_space_log2 = 64.0;
  EXPECT_NO_THROW(ml_exact(big.channel, big.rx_vector, Constellation(4), opts));
  opts.max_nodes = 10;
  const MimoInstance low_snr = instance(12, 4, -5.0, 2);
  EXPECT_THROW(ml_exact(low_snr.channel, low_snr.rx_vector, Constellation(4), opts), SearchBudgetError);
  const MimoInstance n13 = instance(13, 4, 0.0, 3);
  EXPECT_THROW(ml_exhaustive(n13.channel, n13.rx_vector, Constellation(4)), SearchBudgetError);
  SphereDecoderStats stats;
  ml_exact(low_snr.channel, low_snr.rx_vector, Constellation(4), {}, &stats);
  EXPECT_GE(stats.leaves, 1u);
  EXPECT_GE(stats.nodes, 24u);
}
