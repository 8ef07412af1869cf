// Detects one 8x8 16-QAM frame with every detector and prints bit errors.

#include <cstdio>

#include "mimo/mimo.hpp"

int main() {
  const int n = 8;
  const mimo::Constellation c(16);
  const mimo::SeedInfo seeds{mimo::derive_seed(7, mimo::SeedRole::channel),
                             mimo::derive_seed(7, mimo::SeedRole::message),
                             mimo::derive_seed(7, mimo::SeedRole::noise)};
  const mimo::MimoInstance inst = mimo::make_instance(n, c, 14.0, seeds);

  auto report = [&](const char* name, const mimo::CVector& x) {
    const mimo::Bits bits = mimo::demodulate_symbols(mimo::to_std(x), c);
    std::printf("%-5s bit errors %2lld / %zu   residual %.4f\n", name,
                static_cast<long long>(mimo::hamming(bits, inst.tx_bits)), bits.size(),
                mimo::residual_energy(inst.channel, inst.rx_vector, x));
  };

  report("zf", mimo::zf_detect(inst.channel, inst.rx_vector, c).symbols);
  report("mmse", mimo::mmse_detect(inst.channel, inst.rx_vector, inst.sigma_sq, c.symbol_energy(), c).symbols);
  report("ml", mimo::ml_exact(inst.channel, inst.rx_vector, c).symbols);

  const mimo::BinaryIsingModel binary = mimo::build_binary_model(inst);
  const auto bpim_params = mimo::default_parameters(mimo::Paradigm::bpim, n, 16);
  const auto b = mimo::bpim_solve(binary, mimo::make_config(bpim_params, 11));
  report("bpim", mimo::spins_to_symbols(b.best_state, n, 16));

  const mimo::PditModel pdit = mimo::build_pdit_model(inst.channel, inst.rx_vector, c);
  const auto dpim_params = mimo::default_parameters(mimo::Paradigm::dpim, n, 16);
  const auto d = mimo::dpim_solve(pdit, c, mimo::make_config(dpim_params, 11));
  report("dpim", mimo::pdits_to_symbols(d.best_state));
  return 0;
}
