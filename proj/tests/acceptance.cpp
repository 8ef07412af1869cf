// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Takes about a quarter of an hour on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mimo/mimo.hpp"

using namespace mimo;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

MimoInstance seeded_instance(int n, int order, double ebn0, std::uint64_t master, std::uint64_t k) {
  const std::uint64_t base = derive_seed(master, SeedRole::channel, {k});
  return make_instance(n, Constellation(order), ebn0,
                       {derive_seed(base, SeedRole::channel), derive_seed(base, SeedRole::message),
                        derive_seed(base, SeedRole::noise)});
}

std::vector<double> boltzmann(const std::vector<double>& energies, double beta) {
  double emin = energies[0];
  for (double e : energies) emin = std::min(emin, e);
  std::vector<double> p(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(-beta * (energies[i] - emin)));
  for (double& v : p) v /= z;
  return p;
}

double total_variation(const std::vector<double>& p, const std::vector<long>& counts, long total) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - static_cast<double>(counts[i]) / total);
  return 0.5 * tv;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  write_csv(out, r.points);
  return out.str();
}

const BerPoint& point(const SweepResult& r, const char* detector, double ebn0) {
  const BerPoint* p = find_point(r, detector, ebn0);
  if (p == nullptr) throw std::logic_error(std::string("missing point ") + detector);
  return *p;
}

Interval ci_of(const BerPoint& p) { return binomial_interval(p.bit_errors, p.bits_transmitted); }

std::string ber_row(const BerPoint& p) { return p.detector + "=" + fmt(p.ber); }

// 1: energy encodings reproduce the residual, and p-dit deltas match full
// energy differences.
Verdict encoding_equivalence() {
  Verdict v;
  Rng rng(101);
  const int ns[] = {1, 2, 4, 8, 16};
  const int orders[] = {2, 4, 16, 64};
  double worst_binary = 0.0, worst_pdit = 0.0, worst_delta = 0.0;
  int instances = 0;
  for (int rep = 0; rep < 10; ++rep) {
    for (int n : ns) {
      for (int order : orders) {
        const Constellation c(order);
        const MimoInstance inst = make_instance(n, c, -2.0 + 2.0 * rep, {rng.bits(), rng.bits(), rng.bits()});
        const BinaryIsingModel bm = build_binary_model(inst);
        const PditModel pm = build_pdit_model(inst.channel, inst.rx_vector, c);
        const double y2 = inst.rx_vector.squaredNorm();
        for (int t = 0; t < 32; ++t) {
          CVector x(n);
          for (int i = 0; i < n; ++i) x(i) = c.alphabet()[rng.bits() % c.alphabet().size()];
          const double residual = residual_energy(inst.channel, inst.rx_vector, x);
          const double scale = residual + y2;

          const double eb = binary_energy(symbols_to_spins(x, order), bm) + bm.offset;
          worst_binary = std::max(worst_binary, std::abs(eb - residual) / scale);

          const PditState d = symbols_to_pdits(x);
          const double ep = pdit_energy(d, pm);
          worst_pdit = std::max(worst_pdit, std::abs(ep - (residual - y2)) / scale);

          const int i = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(n));
          const Complex to = c.alphabet()[rng.bits() % c.alphabet().size()];
          CVector moved = x;
          moved(i) = to;
          const double delta = pdit_delta_energy(i, Eigen::Vector2d(x(i).real(), x(i).imag()),
                                                 Eigen::Vector2d(to.real(), to.imag()), d, pm);
          const double full = pdit_energy(symbols_to_pdits(moved), pm) - ep;
          worst_delta = std::max(worst_delta, std::abs(delta - full) / scale);
        }
        ++instances;
      }
    }
  }
  if (worst_binary > 1e-9) v.fail("binary relative error " + fmt(worst_binary));
  if (worst_pdit > 1e-9) v.fail("p-dit relative error " + fmt(worst_pdit));
  if (worst_delta > 1e-9) v.fail("delta relative error " + fmt(worst_delta));
  v.detail = std::to_string(instances) + " instances x 32 states, worst rel err binary " + fmt(worst_binary) +
             ", p-dit " + fmt(worst_pdit) + ", delta " + fmt(worst_delta) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 2: fixed-beta Gibbs chains sample the Boltzmann distribution.
Verdict sampler_correctness() {
  Verdict v;
  const double beta = 0.5;
  const long sweeps = 1000000;

  const Constellation c(4);
  const MimoInstance inst = make_instance(2, c, 0.0, {24, 25, 26});
  const PditModel pm = build_pdit_model(inst.channel, inst.rx_vector, c);
  std::vector<double> energies(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      CVector x(2);
      x << c.alphabet()[static_cast<std::size_t>(a)], c.alphabet()[static_cast<std::size_t>(b)];
      energies[static_cast<std::size_t>(a * 4 + b)] = pdit_energy(symbols_to_pdits(x), pm);
    }
  }
  DpimChain dchain(pm, c, 17);
  std::vector<long> counts(16, 0);
  for (long k = 0; k < sweeps; ++k) {
    dchain.sweep(beta);
    ++counts[static_cast<std::size_t>(dchain.indices()[0] * 4 + dchain.indices()[1])];
  }
  const std::vector<double> p_d = boltzmann(energies, beta);
  const double tv_d = total_variation(p_d, counts, sweeps);

  // Four spins: the binary model of the same 2x2 4-QAM channel.
  const BinaryIsingModel bm = build_binary_model(inst);
  for (int mask = 0; mask < 16; ++mask) {
    RVector s(4);
    for (int i = 0; i < 4; ++i) s(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    energies[static_cast<std::size_t>(mask)] = binary_energy(s, bm);
  }
  BpimChain bchain(bm, 5);
  std::fill(counts.begin(), counts.end(), 0);
  for (long k = 0; k < sweeps; ++k) {
    bchain.sweep(beta);
    int mask = 0;
    for (int i = 0; i < 4; ++i) mask |= (bchain.state()(i) > 0 ? 1 : 0) << i;
    ++counts[static_cast<std::size_t>(mask)];
  }
  const std::vector<double> p_b = boltzmann(energies, beta);
  const double tv_b = total_variation(p_b, counts, sweeps);

  if (tv_d >= 0.01) v.fail("dPIM TV " + fmt(tv_d));
  if (tv_b >= 0.01) v.fail("bPIM TV " + fmt(tv_b));
  v.detail = "10^6 sweeps at beta 0.5, TV dPIM " + fmt(tv_d) + ", bPIM " + fmt(tv_b) + ", largest state probability " +
             fmt(*std::max_element(p_d.begin(), p_d.end())) + " / " + fmt(*std::max_element(p_b.begin(), p_b.end())) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 3: the sphere decoder agrees with brute force.
Verdict exact_ml_gate() {
  Verdict v;
  struct Shape {
    int n, order;
  };
  const Shape shapes[] = {{16, 2}, {8, 4}, {4, 16}, {2, 64}, {12, 2}, {5, 4}, {3, 16}, {1, 64}, {6, 4}, {2, 16}};
  int mismatches = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Shape s = shapes[k % 10];
    const Constellation c(s.order);
    const MimoInstance inst = seeded_instance(s.n, s.order, -4.0 + 4.0 * static_cast<double>(k % 5), 303, k);
    const DetectionResult sd = ml_exact(inst.channel, inst.rx_vector, c);
    const DetectionResult ex = ml_exhaustive(inst.channel, inst.rx_vector, c);
    if (sd.symbols != ex.symbols) ++mismatches;
  }
  if (mismatches > 0) v.fail(std::to_string(mismatches) + " mismatches");
  v.detail = "100 instances with M^N <= 65536, " + std::to_string(mismatches) + " decision mismatches" +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// Heuristic BER inside the Clopper-Pearson interval of the sphere decoder.
void check_ml_parity(Verdict& v, const SweepResult& r, const char* heuristic, double ebn0) {
  const BerPoint& h = point(r, heuristic, ebn0);
  const Interval ml = ci_of(point(r, "ml", ebn0));
  if (!ml.contains(h.ber)) {
    v.fail(std::string(heuristic) + " at " + fmt(ebn0) + " dB outside ML interval [" + fmt(ml.lower) + ", " +
           fmt(ml.upper) + "]");
  }
}

std::string summary_at(const SweepResult& r, double ebn0, const std::vector<const char*>& detectors) {
  std::string s = fmt(ebn0) + " dB:";
  for (const char* d : detectors) s += " " + ber_row(point(r, d, ebn0));
  return s;
}

// 4: 16x16 BPSK, bPIM and OIM match ML and do no worse than MMSE.
Verdict bpsk_optimality() {
  Verdict v;
  // 447 channels x 14 messages x 16 bits.
  ExperimentPlan plan = plan_experiment(16, 2, {4.0, 8.0, 12.0}, 447 * 14 * 16, 404);
  plan.detectors = {DetectorKind::mmse, DetectorKind::ml, DetectorKind::bpim, DetectorKind::oim};
  const SweepResult r = run_ber_sweep(plan, 1, &std::cerr);
  std::string rows;
  for (double e : plan.ebn0_db) {
    for (const char* h : {"bpim", "oim"}) {
      check_ml_parity(v, r, h, e);
      if (point(r, h, e).ber > point(r, "mmse", e).ber) v.fail(std::string(h) + " above MMSE at " + fmt(e) + " dB");
    }
    rows += (rows.empty() ? "" : " | ") + summary_at(r, e, {"mmse", "ml", "bpim", "oim"});
  }
  v.detail = std::to_string(plan.total_bits) + " bits; " + rows + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 5 and 9 share one plan: 16x16 4-QAM.
ExperimentPlan qam4_plan() {
  // 224 channels x 14 messages x 32 bits.
  ExperimentPlan plan = plan_experiment(16, 4, {6.0, 9.0, 12.0}, 224 * 14 * 32, 505);
  plan.detectors = {DetectorKind::mmse, DetectorKind::ml, DetectorKind::bpim, DetectorKind::dpim};
  return plan;
}

Verdict qam4_parity(const SweepResult& r, const ExperimentPlan& plan) {
  Verdict v;
  std::string rows;
  for (double e : plan.ebn0_db) {
    const Interval mmse = ci_of(point(r, "mmse", e));
    for (const char* h : {"dpim", "bpim"}) {
      check_ml_parity(v, r, h, e);
      const BerPoint& p = point(r, h, e);
      if (!ci_of(p).overlaps(mmse) && p.ber >= point(r, "mmse", e).ber) {
        v.fail(std::string(h) + " separated from and above MMSE at " + fmt(e) + " dB");
      }
    }
    rows += (rows.empty() ? "" : " | ") + summary_at(r, e, {"mmse", "ml", "bpim", "dpim"});
  }
  v.detail = std::to_string(plan.total_bits) + " bits; " + rows + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 6: 16x16 16-QAM ordering dPIM <= MMSE <= ZF.
Verdict qam16_ordering() {
  Verdict v;
  // 112 channels x 14 messages x 64 bits.
  ExperimentPlan plan = plan_experiment(16, 16, {10.0, 14.0, 18.0}, 112 * 14 * 64, 606);
  plan.detectors = {DetectorKind::zf, DetectorKind::mmse, DetectorKind::dpim};
  const SweepResult r = run_ber_sweep(plan, 1, &std::cerr);
  std::string rows;
  for (double e : plan.ebn0_db) {
    const double zf = point(r, "zf", e).ber, mmse = point(r, "mmse", e).ber, dpim = point(r, "dpim", e).ber;
    if (dpim > mmse) v.fail("dPIM above MMSE at " + fmt(e) + " dB");
    if (zf < mmse) v.fail("ZF below MMSE at " + fmt(e) + " dB");
    rows += (rows.empty() ? "" : " | ") + summary_at(r, e, {"zf", "mmse", "dpim"});
  }
  v.detail = std::to_string(plan.total_bits) + " bits; " + rows + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 7: bPIM beta sweep minima sit near 13 / (N sqrt(M)); the fit recovers
// known exponents exactly.
Verdict beta_minima() {
  Verdict v;
  BetaSweepOptions opts;
  opts.instances_per_ebn0 = 20;
  opts.trials = 50;
  opts.seed = 707;
  std::string rows;
  const int shapes[][2] = {{8, 4}, {16, 4}, {8, 16}, {16, 16}};
  for (const auto& s : shapes) {
    const double law = 13.0 / (s[0] * std::sqrt(static_cast<double>(s[1])));
    const BetaCurve curve = beta_sweep(s[0], s[1], Paradigm::bpim, log_grid(law / 30.0, law * 30.0, 25), opts);
    const double ratio = curve.beta_min / law;
    if (ratio < 0.5 || ratio > 2.0) {
      v.fail("N=" + std::to_string(s[0]) + " M=" + std::to_string(s[1]) + " ratio " + fmt(ratio));
    }
    rows += (rows.empty() ? "" : ", ") + std::string("(") + std::to_string(s[0]) + "," + std::to_string(s[1]) +
            ") " + fmt(curve.beta_min) + "/" + fmt(law);
  }

  std::vector<ScalingPoint> qam, antennas;
  for (int n : {4, 8, 16, 32}) {
    for (int m : {4, 16, 64}) qam.push_back({n, m, 13.0 / (n * std::sqrt(static_cast<double>(m)))});
    antennas.push_back({n, 2, std::sqrt(3.0) * std::pow(static_cast<double>(n), -2.0 / 3.0)});
  }
  const ScalingFit fq = fit_scaling_law(qam, ScalingFamily::qam);
  const ScalingFit fa = fit_scaling_law(antennas, ScalingFamily::antennas);
  const double err_q = std::abs(fq.exponent + 1.0), err_a = std::abs(fa.exponent + 2.0 / 3.0);
  if (err_q > 1e-9) v.fail("QAM exponent error " + fmt(err_q));
  if (err_a > 1e-9) v.fail("BPSK exponent error " + fmt(err_a));
  v.detail = "minimum/law " + rows + "; synthetic exponents " + fmt(fq.exponent) + ", " + fmt(fa.exponent) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 8: zero-error confidence bound.
Verdict confidence_bound() {
  Verdict v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", ber_upper_bound(8601600));
  if (std::string(buf) != "3.48e-07") v.fail("got " + std::string(buf));
  v.detail = std::string("bound(8601600) = ") + buf + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// 10: 256x256 BPSK bPIM on ten messages at 12 dB.
Verdict scaling_smoke() {
  Verdict v;
  ExperimentPlan plan = plan_experiment(256, 2, {12.0}, 10 * 256, 1010, 10);
  plan.detectors = {DetectorKind::bpim};
  const SweepResult r = run_ber_sweep(plan, 1, &std::cerr);
  const BerPoint& p = point(r, "bpim", 12.0);
  if (p.bit_errors != 0 || p.failures != 0) v.fail(std::to_string(p.bit_errors) + " bit errors");
  v.detail = "10 instances, " + std::to_string(p.bits_transmitted) + " bits, " + std::to_string(p.bit_errors) +
             " errors" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::function<Verdict()>& run) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << v.detail << " (" << fmt(secs)
              << " s)" << std::endl;
  };

  report(1, encoding_equivalence);
  report(2, sampler_correctness);
  report(3, exact_ml_gate);
  report(8, confidence_bound);
  report(4, bpsk_optimality);

  const ExperimentPlan plan = qam4_plan();
  SweepResult single;
  std::string csv_single, csv_double;
  report(5, [&] {
    single = run_ber_sweep(plan, 1, &std::cerr);
    csv_single = csv_of(single);
    return qam4_parity(single, plan);
  });
  report(9, [&] {
    Verdict v;
    if (csv_single.empty()) csv_single = csv_of(run_ber_sweep(plan, 1, &std::cerr));
    csv_double = csv_of(run_ber_sweep(plan, 2, &std::cerr));
    if (csv_single != csv_double) v.fail("CSV differs between 1 and 2 threads");
    v.detail = "criterion 5 plan at 1 and 2 threads, " + std::to_string(csv_single.size()) + " CSV bytes" +
               (v.pass ? ", identical" : "; " + v.detail);
    return v;
  });

  report(6, qam16_ordering);
  report(7, beta_minima);
  report(10, scaling_smoke);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
