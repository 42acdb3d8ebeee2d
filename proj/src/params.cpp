#include "twsat/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twsat {

namespace {

// f(x) = x^c - x^(c-1) - ... - x - 1, evaluated stably for x in [1,2].
double char_poly(int c, double x) {
  double acc = 1.0;  // x^0
  double pw = 1.0;
  for (int i = 1; i < c; ++i) {
    pw *= x;
    acc += pw;
  }
  return pw * x - acc;
}

double char_poly_deriv(int c, double x) {
  double acc = 0.0;
  double pw = 1.0;  // x^0
  for (int i = 1; i < c; ++i) {
    acc += i * pw;
    pw *= x;
  }
  return c * pw - acc;
}

}  // namespace

Schedule compute_schedule(int c) {
  if (c < 2 || c > 32)
    throw std::invalid_argument("compute_schedule: c must lie in [2,32], got " + std::to_string(c));

  // f(1) = 1 - c < 0 and f(2) = 1 > 0, and f has exactly one root in (1,2).
  double lo = 1.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (char_poly(c, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  double gamma = 0.5 * (lo + hi);
  for (int it = 0; it < 64; ++it) {
    double f = char_poly(c, gamma);
    double df = char_poly_deriv(c, gamma);
    double next = gamma - f / df;
    if (next < 1.0 || next > 2.0) break;
    if (std::abs(next - gamma) < 1e-15) {
      gamma = next;
      break;
    }
    gamma = next;
  }
  // residual scaled by the polynomial's leading magnitude
  if (std::abs(char_poly(c, gamma)) > 1e-12 * std::pow(gamma, c))
    throw std::runtime_error("compute_schedule: root refinement did not converge for c = " +
                             std::to_string(c));

  Schedule sched;
  sched.c = c;
  sched.gamma_c = gamma;
  sched.lambda_c = 1.0 / std::log2(gamma);

  // alpha_{c,1} = 1 - 1/gamma; sum_{i=1..c} (1 - alpha_1)^i = 1 is the
  // characteristic equation in beta = 1/gamma.
  double a1 = 1.0 - 1.0 / gamma;
  sched.alphas.assign(static_cast<size_t>(c), 0.0);
  sched.alphas[0] = a1;
  double beta = 1.0 - a1;
  for (int i = 2; i < c; ++i) {
    double bi = std::pow(beta, i);
    sched.alphas[static_cast<size_t>(i) - 1] = 1.0 - a1 * bi / (2.0 * a1 - 1.0 + bi);
  }
  sched.alphas[static_cast<size_t>(c) - 1] = 0.0;
  return sched;
}

double depth_bound(int c, long long n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("depth_bound: N must be >= 1");
  double logn = std::log2(static_cast<double>(n_nodes));
  if (logn < static_cast<double>(c)) return logn;
  Schedule sched = compute_schedule(c);
  return sched.lambda_c * (logn - c) + c;
}

TradeoffParams plan_parameters(double epsilon_prime, int d) {
  if (!(epsilon_prime > 0.0)) throw std::invalid_argument("plan_parameters: eps' must be > 0");
  if (d != 2 && d != 3) throw std::invalid_argument("plan_parameters: d must be 2 or 3");
  for (int c = 2; c <= 64; ++c) {
    double eps = epsilon_prime / c;
    if (!(eps < 1.0)) continue;
    double bound = (1.0 + 2.0 / std::pow(2.0, c / 2.0)) * (1.0 - eps);
    if (bound < 1.0) {
      TradeoffParams params{c, eps};
      if (c <= 32 && !(compute_schedule(c).lambda_c * (1.0 - eps) < 1.0))
        throw std::logic_error("plan_parameters: planned c fails the exponent check");
      return params;
    }
  }
  throw std::logic_error("plan_parameters: no feasible c found");  // cannot happen
}

}  // namespace twsat
