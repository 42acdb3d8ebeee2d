#pragma once

#include <vector>

namespace twsat {

struct TradeoffParams {
  int c = 2;              // bound on splitting nodes per subtree, >= 2
  double epsilon = 0.5;   // fraction of bag bits left free, in (0,1)
};

/// Per-c constants of the tradeoff family. gamma_c is the dominant root of
/// X^c - X^(c-1) - ... - X - 1, lambda_c = 1/log2(gamma_c), and the alphas
/// balance the recursion depth across branch types (alpha_{c,c} = 0).
struct Schedule {
  int c = 0;
  double gamma_c = 0.0;
  double lambda_c = 0.0;
  std::vector<double> alphas;  // alphas[i-1] = alpha_{c,i}, i = 1..c

  double alpha(int i) const { return alphas[static_cast<size_t>(i) - 1]; }
};

Schedule compute_schedule(int c);

/// Depth yardstick: lambda_c * (log2 N - c) + c for N >= 2^c, log2 N below.
double depth_bound(int c, long long n_nodes);

/// Smallest c with (1 + 2/2^(c/2)) * (1 - eps'/c) < 1 and eps'/c < 1,
/// paired with epsilon = eps'/c. Guarantees lambda_c * (1 - epsilon) < 1.
TradeoffParams plan_parameters(double epsilon_prime, int d);

}  // namespace twsat
