#pragma once

#include <cmath>
#include <vector>

#include "losc/nets.hpp"

// Plain scalar-loop forward pass over the same flat parameter layout
// (column-major blocks, GRU with reset applied before the candidate).
inline std::vector<std::vector<double>> scalar_forward(const losc::NetSpec& s,
                                                       const std::vector<double>& w,
                                                       const std::vector<std::vector<double>>& xs,
                                                       std::vector<double> h) {
  const int in = s.obs_dim, h1 = s.hidden1, h2 = s.hidden2, h3 = s.hidden3, out = s.out_dim;
  int off = 0;
  auto block = [&](int n) {
    const int at = off;
    off += n;
    return at;
  };
  const int W1 = block(h1 * in), B1 = block(h1), WZ = block(h2 * h1), WR = block(h2 * h1),
            WN = block(h2 * h1), UZ = block(h2 * h2), UR = block(h2 * h2), UN = block(h2 * h2),
            BZ = block(h2), BR = block(h2), BN = block(h2), W3 = block(h3 * h2), B3 = block(h3),
            W4 = block(out * h3), B4 = block(out);
  auto at = [&](int base, int rows, int i, int j) { return w[base + i + rows * j]; };
  auto sig = [](double a) { return 1.0 / (1.0 + std::exp(-a)); };

  std::vector<std::vector<double>> outputs;
  for (const auto& x : xs) {
    std::vector<double> a1(h1);
    for (int i = 0; i < h1; ++i) {
      double acc = w[B1 + i];
      for (int j = 0; j < in; ++j) acc += at(W1, h1, i, j) * x[j];
      a1[i] = std::tanh(acc);
    }
    std::vector<double> z(h2), r(h2), n(h2), hn(h2);
    for (int i = 0; i < h2; ++i) {
      double az = w[BZ + i], ar = w[BR + i];
      for (int j = 0; j < h1; ++j) {
        az += at(WZ, h2, i, j) * a1[j];
        ar += at(WR, h2, i, j) * a1[j];
      }
      for (int j = 0; j < h2; ++j) {
        az += at(UZ, h2, i, j) * h[j];
        ar += at(UR, h2, i, j) * h[j];
      }
      z[i] = sig(az);
      r[i] = sig(ar);
    }
    for (int i = 0; i < h2; ++i) {
      double an = w[BN + i];
      for (int j = 0; j < h1; ++j) an += at(WN, h2, i, j) * a1[j];
      for (int j = 0; j < h2; ++j) an += at(UN, h2, i, j) * (r[j] * h[j]);
      n[i] = std::tanh(an);
      hn[i] = (1.0 - z[i]) * n[i] + z[i] * h[i];
    }
    h = hn;
    std::vector<double> a3(h3);
    for (int i = 0; i < h3; ++i) {
      double acc = w[B3 + i];
      for (int j = 0; j < h2; ++j) acc += at(W3, h3, i, j) * h[j];
      a3[i] = std::tanh(acc);
    }
    std::vector<double> y(out);
    for (int i = 0; i < out; ++i) {
      double acc = w[B4 + i];
      for (int j = 0; j < h3; ++j) acc += at(W4, out, i, j) * a3[j];
      y[i] = acc;
    }
    outputs.push_back(y);
  }
  return outputs;
}
