#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qbench/rng.hpp"

namespace synthetic {

/// Writes a credit-style CSV: an ID column, `features` numeric columns and
/// the UCI target column, with `positive_rate` of the rows positive. The
/// first half of the columns carry a class shift, the rest are noise.
inline void write_credit_csv(const std::filesystem::path& path, std::size_t rows, std::size_t features,
                             std::uint64_t seed, double shift = 1.0, double positive_rate = 0.25) {
  qbench::Rng rng(seed);
  std::ofstream out(path);
  out << "ID";
  for (std::size_t j = 0; j < features; ++j) out << ",X" << j;
  out << ",default.payment.next.month\n";
  char buf[32];
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = rng.uniform() < positive_rate ? 1 : 0;
    out << i + 1;
    for (std::size_t j = 0; j < features; ++j) {
      const double signal = j < (features + 1) / 2 && y ? shift : 0.0;
      std::snprintf(buf, sizeof buf, "%.6f", signal + rng.normal() * (1.0 + 0.2 * static_cast<double>(j)));
      out << ',' << buf;
    }
    out << ',' << y << '\n';
  }
}

}  // namespace synthetic
