#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

/// Ground truth computed from language definitions and closed-form logit
/// formulas only. Nothing here touches the transformer implementation; tests
/// use these functions to check forward passes of the hand-built networks.
///
/// Throughout, n counts positions including CLS (n = |w| + 1) and k is the
/// number of ones in w.
namespace hardattn::oracles {

bool parity_oracle(std::span<const std::uint8_t> w) noexcept;
bool first_oracle(std::span<const std::uint8_t> w) noexcept;

/// CLS logit of the exact PARITY network without normalization.
///
/// Even n: (-1)^{k+1} 2 tanh(c) / n^2.
/// Odd n, with Z1 = (n-1)/2 e^c + (n+1)/2 e^-c and Z2 = (n+1)/2 e^c + (n-1)/2 e^-c:
///   k even: -(n-1) sinh(2c) / (n Z1 Z2)
///   k odd:  +(n+1) sinh(2c) / (n Z1 Z2)
/// The odd-k numerator expands from e^c Z2 - e^-c Z1 = (n+1)/2 (e^{2c} - e^{-2c}),
/// i.e. a sinh, not a cosh.
double parity_logit(std::size_t n, std::size_t k, double c);

/// Same network with every post-residual vector multiplied by a constant:
/// c^1 by C1, a^1 by A1, c^2 by C2, a^2 by A2. With lambda = A1 C1 both query
/// and key grow by lambda, so the attention constant becomes lambda^2 c, and the
/// value grows by lambda:  C2 A2 lambda * parity_logit(n, k, lambda^2 c).
double parity_logit_scaled(std::size_t n, std::size_t k, double c, double C1, double A1, double C2,
                           double A2);

/// CLS logit of the exact FIRST network. Standard attention:
/// e^c / (e^c + n - 1) (1[w_1=1] - 1/2). Log-length attention replaces e^c by
/// n^c, which for c = 1 gives n / (2n - 1) (1[w_1=1] - 1/2).
/// Throws InvalidArgument for n < 2.
double first_logit(std::size_t n, bool w1_is_one, double c, bool log_length);

/// FIRST logit with constant activation scales (C1, A1, C2, A2):
/// e^{lambda^2 c g} / (e^{lambda^2 c g} + n - 1) C2 A2 lambda (1[w_1=1] - 1/2),
/// lambda = A1 C1, g = ln n under log-length attention and 1 otherwise.
double first_logit_scaled(std::size_t n, bool w1_is_one, double c, double C1, double A1,
                          double C2, double A2, bool log_length);

/// Final-normalization form for log-length FIRST with c = 1:
/// s (1/6 (1 + s^2) + eps)^{-1/2}, s = n/(2n-1)(1[w_1=1] - 1/2). This treats
/// the last normalization as the only one; see wrapped_first_logit for the
/// logit of the network with every sublayer normalized.
double first_logit_ln(std::size_t n, bool w1_is_one, double eps);

/// Lower bound 1/4 (5/24 + eps)^{-1/2} on |first_logit_ln|.
double first_logit_ln_bound(double eps);

/// Logit of the negation-wrapped FIRST network (width 12) with layer
/// normalization at every sublayer, derived position by position:
/// each normalization rescales a sparse +/- vector by 1/sqrt(var + eps), the
/// CLS query and position-1 key pick up their own scales lambda_0, lambda_1,
/// and the final logit is A2 C2 alpha_1 v with alpha_1 the CLS weight on
/// position 1 and v = lambda_1 (1[w_1=1] - 1/2).
double wrapped_first_logit(std::size_t n, bool w1_is_one, double c, double eps, bool log_length);

/// CLS logit of the single-layer FIRST network:
/// (E - 1)/(E + n - 1) (1[w_1=1] - 1/2) + (k - n/2)/(E + n - 1),
/// with E = e^c (standard) or n^c (log-length).
double flawed_first_logit(std::size_t n, std::size_t k, bool w1_is_one, double c,
                          bool log_length);

}  // namespace hardattn::oracles
