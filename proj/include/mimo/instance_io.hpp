#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mimo/channel.hpp"

namespace mimo {

// Line-oriented instance dump, one value or matrix entry per line:
//
//   # mimo-instance v1
//   n_rx <int>
//   n_tx <int>
//   order <int>
//   ebn0_db <real>
//   sigma_sq <real>
//   seeds <channel> <message> <noise>
//   H <row> <col> <re> <im>     (n_rx * n_tx lines, column-major)
//   x <index> <re> <im>         (n_tx lines)
//   y <index> <re> <im>         (n_rx lines)
//
// Reals are printed with 17 significant digits so a load reproduces the
// dumped instance exactly.
namespace detail {
inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_instance(std::ostream& out, const MimoInstance& inst) {
  using detail::fmt_real;
  out << "# mimo-instance v1\n";
  out << "n_rx " << inst.n_rx << "\n";
  out << "n_tx " << inst.n_tx << "\n";
  out << "order " << inst.order << "\n";
  out << "ebn0_db " << fmt_real(inst.ebn0_db) << "\n";
  out << "sigma_sq " << fmt_real(inst.sigma_sq) << "\n";
  out << "seeds " << inst.seeds.channel << " " << inst.seeds.message << " " << inst.seeds.noise << "\n";
  for (Eigen::Index j = 0; j < inst.channel.cols(); ++j) {
    for (Eigen::Index i = 0; i < inst.channel.rows(); ++i) {
      out << "H " << i << " " << j << " " << fmt_real(inst.channel(i, j).real()) << " "
          << fmt_real(inst.channel(i, j).imag()) << "\n";
    }
  }
  for (Eigen::Index i = 0; i < inst.tx_symbols.size(); ++i) {
    out << "x " << i << " " << fmt_real(inst.tx_symbols(i).real()) << " "
        << fmt_real(inst.tx_symbols(i).imag()) << "\n";
  }
  for (Eigen::Index i = 0; i < inst.rx_vector.size(); ++i) {
    out << "y " << i << " " << fmt_real(inst.rx_vector(i).real()) << " "
        << fmt_real(inst.rx_vector(i).imag()) << "\n";
  }
}

inline MimoInstance read_instance(std::istream& in) {
  MimoInstance inst;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# mimo-instance v1", 0) != 0) {
    throw std::runtime_error("instance file: missing '# mimo-instance v1' header");
  }
  bool have_shape = false;
  auto ensure_shape = [&] {
    if (have_shape) return;
    if (inst.n_rx < 1 || inst.n_tx < 1) throw std::runtime_error("instance file: entries before n_rx/n_tx");
    inst.channel = CMatrix::Zero(inst.n_rx, inst.n_tx);
    inst.tx_symbols = CVector::Zero(inst.n_tx);
    inst.rx_vector = CVector::Zero(inst.n_rx);
    have_shape = true;
  };
  auto check_index = [](long idx, long bound, const std::string& what) {
    if (idx < 0 || idx >= bound) throw std::runtime_error("instance file: " + what + " index out of range");
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "n_rx") {
      ss >> inst.n_rx;
    } else if (key == "n_tx") {
      ss >> inst.n_tx;
    } else if (key == "order") {
      ss >> inst.order;
    } else if (key == "ebn0_db") {
      ss >> inst.ebn0_db;
    } else if (key == "sigma_sq") {
      ss >> inst.sigma_sq;
    } else if (key == "seeds") {
      ss >> inst.seeds.channel >> inst.seeds.message >> inst.seeds.noise;
    } else if (key == "H") {
      ensure_shape();
      long i = 0, j = 0;
      double re = 0, im = 0;
      ss >> i >> j >> re >> im;
      check_index(i, inst.n_rx, "H row");
      check_index(j, inst.n_tx, "H column");
      inst.channel(i, j) = Complex{re, im};
    } else if (key == "x" || key == "y") {
      ensure_shape();
      long i = 0;
      double re = 0, im = 0;
      ss >> i >> re >> im;
      if (key == "x") {
        check_index(i, inst.n_tx, "x");
        inst.tx_symbols(i) = Complex{re, im};
      } else {
        check_index(i, inst.n_rx, "y");
        inst.rx_vector(i) = Complex{re, im};
      }
    } else {
      throw std::runtime_error("instance file: unknown key '" + key + "'");
    }
    if (ss.fail()) throw std::runtime_error("instance file: malformed line '" + line + "'");
  }
  ensure_shape();
  const Constellation c(inst.order);
  inst.tx_bits = demodulate_symbols(to_std(inst.tx_symbols), c);
  return inst;
}

}  // namespace mimo
