#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "mimo/ising_map.hpp"
#include "mimo/replicas.hpp"
#include "mimo/schedule.hpp"
#include "mimo/seed.hpp"

namespace mimo {

// Kuramoto-type oscillator Ising machine integrated with stochastic Heun.
//
//   dphi_i/dt = -K C_i - S sin(2 phi_i) + T xi_i
//   C_i = sum_j J_ij tanh(10 sin(phi_i - phi_j)) + h_i sin(phi_i)
//
// The bias term is the phase gradient of -h_i cos(phi_i), which makes the
// cos-sign readout descend H_b. The noise increment T * eta * sqrt(dt) is
// drawn once per step and shared by the predictor and corrector.
class OimChain {
 public:
  OimChain(const BinaryIsingModel& model, const OimParams& params, std::uint64_t seed)
      : model_(&model), params_(params), rng_(seed) {
    if (!(params.dt > 0.0)) throw std::invalid_argument("OIM time step must be positive");
    const int n = model.n;
    // Coupling sums run in single precision; the integrator state stays double.
    j_float_ = model.j_matrix.cast<float>();
    phase_.resize(n);
    for (int i = 0; i < n; ++i) phase_(i) = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    sin_.resize(n);
    cos_.resize(n);
    arg_.resize(n, n);
    drift0_.resize(n);
    drift1_.resize(n);
    predicted_.resize(n);
    noise_.resize(n);
  }

  void set_phases(const RVector& phases) {
    if (phases.size() != model_->n) throw std::invalid_argument("phase vector length mismatch");
    phase_ = phases;
  }

  // C_i evaluated at the given phases.
  RVector coupling(const RVector& phases) {
    RVector c(phases.size());
    coupling_into(phases, c);
    return c;
  }

  void step(double temperature) {
    const double dt = params_.dt;
    const double noise_scale = temperature * std::sqrt(dt);
    for (Eigen::Index i = 0; i < noise_.size(); ++i) noise_(i) = noise_scale * rng_.normal();
    drift(phase_, drift0_);
    predicted_ = phase_ + dt * drift0_ + noise_;
    drift(predicted_, drift1_);
    phase_ += 0.5 * dt * (drift0_ + drift1_) + noise_;
  }

  RVector readout() const {
    const Eigen::ArrayXf c = phase_.cast<float>().array().cos();
    return (c >= 0.0f).select(RVector::Ones(phase_.size()), -RVector::Ones(phase_.size()));
  }

  const RVector& phases() const noexcept { return phase_; }

 private:
  void coupling_into(const RVector& phases, RVector& out) {
    const Eigen::ArrayXf ph = phases.cast<float>().array();
    sin_ = ph.sin();
    cos_ = ph.cos();
    // arg(j, i) = 10 sin(phi_i - phi_j) = 10 (sin_i cos_j - cos_i sin_j); J is
    // symmetric, so column i of J .* tanh(arg) sums to C_i without the bias.
    arg_ = (10.0f * (cos_.matrix() * sin_.matrix().transpose() - sin_.matrix() * cos_.matrix().transpose()))
               .array()
               .tanh();
    const Eigen::RowVectorXf sums = (j_float_.array() * arg_).colwise().sum();
    out = sums.transpose().cast<double>() + model_->h_vector.cwiseProduct(sin_.cast<double>().matrix());
  }

  void drift(const RVector& phases, RVector& out) {
    coupling_into(phases, out);
    // sin(2 phi) = 2 sin(phi) cos(phi), reusing the values from the coupling.
    out = -params_.coupling * out - (2.0 * params_.binarization) * (sin_ * cos_).cast<double>().matrix();
  }

  const BinaryIsingModel* model_;
  OimParams params_;
  Rng rng_;
  Eigen::MatrixXf j_float_;
  RVector phase_;
  Eigen::ArrayXf sin_;
  Eigen::ArrayXf cos_;
  Eigen::ArrayXXf arg_;
  RVector drift0_;
  RVector drift1_;
  RVector predicted_;
  RVector noise_;
};

// Binarization term of the phase dynamics.
inline double oim_binarization(double phase) noexcept { return std::sin(2.0 * phase); }

inline ReplicaResult<RVector> oim_replica(const BinaryIsingModel& model, const OimParams& params,
                                          const AnnealSchedule& schedule, std::uint64_t seed) {
  OimChain chain(model, params, seed);
  ReplicaResult<RVector> out;
  out.best_energy = std::numeric_limits<double>::infinity();
  RVector spins;
  for (int k = 1; k <= schedule.n_iterations; ++k) {
    chain.step(schedule.at(k));
    spins = chain.readout();
    const double e = binary_energy(spins, model);
    if (e < out.best_energy) {
      out.best_energy = e;
      out.best_state = spins;
      out.best_iteration = k;
    }
  }
  out.final_energy = binary_energy(spins, model);
  return out;
}

inline SolveOutcome<RVector> oim_solve(const BinaryIsingModel& model, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.schedule.kind != AnnealSchedule::Kind::temperature_ramp) {
    throw std::invalid_argument("the oscillator machine anneals a noise temperature");
  }
  if (model.order != 2) throw std::invalid_argument("the oscillator machine is only configured for BPSK models");
  auto out = run_replicated([&](std::uint64_t seed) { return oim_replica(model, cfg.oim, cfg.schedule, seed); },
                            cfg.replicas, cfg.seed, cfg.threads);
  out.iterations = static_cast<long long>(cfg.replicas) * cfg.schedule.n_iterations;
  return out;
}

}  // namespace mimo
