#include "hardattn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardattn/error.hpp"

namespace hardattn::oracles {

namespace {

void check_counts(std::size_t n, std::size_t k) {
  if (n == 0) throw InvalidArgument("oracle: n counts CLS and must be >= 1");
  if (k + 1 > n) throw InvalidArgument("oracle: need 0 <= k <= n - 1");
}

double sign_term(bool w1_is_one) { return w1_is_one ? 0.5 : -0.5; }

}  // namespace

bool parity_oracle(std::span<const std::uint8_t> w) noexcept {
  return std::count(w.begin(), w.end(), std::uint8_t{1}) % 2 == 1;
}

bool first_oracle(std::span<const std::uint8_t> w) noexcept { return !w.empty() && w[0] == 1; }

double parity_logit(std::size_t n, std::size_t k, double c) {
  check_counts(n, k);
  const double nd = static_cast<double>(n);
  if (n % 2 == 0) {
    const double mag = 2.0 * std::tanh(c) / (nd * nd);
    return k % 2 == 1 ? mag : -mag;
  }
  const double ep = std::exp(c);
  const double em = std::exp(-c);
  const double z1 = (nd - 1.0) / 2.0 * ep + (nd + 1.0) / 2.0 * em;
  const double z2 = (nd + 1.0) / 2.0 * ep + (nd - 1.0) / 2.0 * em;
  const double sh = std::sinh(2.0 * c);
  if (k % 2 == 0) return -(nd - 1.0) * sh / (nd * z1 * z2);
  return (nd + 1.0) * sh / (nd * z1 * z2);
}

double parity_logit_scaled(std::size_t n, std::size_t k, double c, double C1, double A1, double C2,
                           double A2) {
  const double lambda = A1 * C1;
  return C2 * A2 * lambda * parity_logit(n, k, lambda * lambda * c);
}

double first_logit(std::size_t n, bool w1_is_one, double c, bool log_length) {
  return first_logit_scaled(n, w1_is_one, c, 1.0, 1.0, 1.0, 1.0, log_length);
}

double first_logit_scaled(std::size_t n, bool w1_is_one, double c, double C1, double A1,
                          double C2, double A2, bool log_length) {
  if (n < 2) throw InvalidArgument("first_logit: n < 2 has no first symbol");
  const double nd = static_cast<double>(n);
  const double lambda = A1 * C1;
  const double g = lambda * lambda * c * (log_length ? std::log(nd) : 1.0);
  // e^g / (e^g + n - 1), written to stay finite for large g.
  const double weight = 1.0 / (1.0 + (nd - 1.0) * std::exp(-g));
  return weight * C2 * A2 * lambda * sign_term(w1_is_one);
}

double first_logit_ln(std::size_t n, bool w1_is_one, double eps) {
  if (eps < 0.0) throw InvalidArgument("first_logit_ln: eps must be nonnegative");
  const double s = first_logit(n, w1_is_one, 1.0, true);
  return s / std::sqrt((1.0 + s * s) / 6.0 + eps);
}

double first_logit_ln_bound(double eps) { return 0.25 / std::sqrt(5.0 / 24.0 + eps); }

double wrapped_first_logit(std::size_t n, bool w1_is_one, double c, double eps, bool log_length) {
  if (n < 2) throw InvalidArgument("wrapped_first_logit: n < 2 has no first symbol");
  if (eps < 0.0) throw InvalidArgument("wrapped_first_logit: eps must be nonnegative");
  constexpr double width = 12.0;
  // A wrapped vector with m entries equal to +/-x (zero mean) has variance m x^2 / 12.
  auto inv_std = [&](double sum_squares) { return 1.0 / std::sqrt(sum_squares / width + eps); };

  // CLS: one-hot on dim 2 only; the first FFNN outputs relu(-C) = 0.
  const double c_cls = inv_std(2.0);
  const double a_cls = inv_std(2.0 * c_cls * c_cls);
  const double lambda0 = a_cls * c_cls;

  // Position 1: one-hot symbol plus the 1[i=1] dimension; the FFNN adds
  // 1[w_1=1] on dim 4 (scaled by the first normalization).
  const double c_one = inv_std(4.0);
  const double a_one = w1_is_one ? inv_std(6.0 * c_one * c_one) : inv_std(4.0 * c_one * c_one);
  const double lambda1 = a_one * c_one;

  const double nd = static_cast<double>(n);
  const double q = c * std::sqrt(6.0) * lambda0;
  double g = q * lambda1 / std::sqrt(width);
  if (log_length) g *= std::log(nd);
  const double alpha1 = 1.0 / (1.0 + (nd - 1.0) * std::exp(-g));
  const double v = lambda1 * sign_term(w1_is_one);

  const double pre = alpha1 * v;  // CLS dim 5 before the second normalization
  const double c2 = inv_std(2.0 * (lambda0 * lambda0 + pre * pre));
  const double sum_sq_c2 = 2.0 * c2 * c2 * (lambda0 * lambda0 + pre * pre);
  const double a2 = inv_std(sum_sq_c2);
  return a2 * c2 * pre;
}

double flawed_first_logit(std::size_t n, std::size_t k, bool w1_is_one, double c,
                          bool log_length) {
  if (n < 2) throw InvalidArgument("flawed_first_logit: n < 2 has no first symbol");
  check_counts(n, k);
  if (w1_is_one && k == 0) throw InvalidArgument("flawed_first_logit: w_1 = 1 needs k >= 1");
  const double nd = static_cast<double>(n);
  const double e = log_length ? std::pow(nd, c) : std::exp(c);
  return (e - 1.0) / (e + nd - 1.0) * sign_term(w1_is_one) +
         (static_cast<double>(k) - nd / 2.0) / (e + nd - 1.0);
}

}  // namespace hardattn::oracles
