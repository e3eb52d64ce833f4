#pragma once

#include "snc/codec.hpp"
#include "snc/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace snc {

/// Erasure probability given directly.
struct FixedErasure {
  double epsilon = 0.0;
};

/// Normal-approximation packet error of a short code on an AWGN link.
struct FiniteBlocklength {
  double snr = 1.0;                  ///< linear SNR rho
  std::uint64_t channel_uses = 1;    ///< n
  std::uint64_t message_bits = 1;    ///< N_bit
};

/// Collision loss in 2-step random access with Poisson(load) active devices.
struct RandomAccess {
  double load = 1.0;            ///< lambda
  std::uint64_t preambles = 2;  ///< L
};

class ChannelModel {
 public:
  using Variant = std::variant<FixedErasure, FiniteBlocklength, RandomAccess>;

  /// Validates parameters; throws ParameterError.
  explicit ChannelModel(Variant model);

  static ChannelModel fixed(double epsilon) { return ChannelModel(FixedErasure{epsilon}); }

  const Variant& model() const noexcept { return model_; }
  /// Per-packet erasure probability.
  double epsilon() const noexcept { return epsilon_; }
  std::string describe() const;

 private:
  Variant model_;
  double epsilon_ = 0.0;
};

/// Independent erasure draw for one packet.
inline bool draw_erasure(double epsilon, RandomStream& rng) { return rng.bernoulli(epsilon); }

/// Passes one packet through the channel.
ReceivedPacket erase(const ChannelModel& channel, RandomStream& rng, CodedPacket packet);

/// V(rho) = rho (2 + rho) / (1 + rho)^2 * (log2 e)^2.
double channel_dispersion(double snr);
/// Q( sqrt(n / V) * (log2(1 + rho) - N_bit / n) ).
double fbl_epsilon(double snr, std::uint64_t channel_uses, std::uint64_t message_bits);
/// Gaussian upper tail via erfc; absolute error below 1e-12 on |x| <= 8.
double qfunc(double x);

/// Collision probability for Poisson(load) devices conditioned on at least one.
double ra_epsilon_poisson(double load, std::uint64_t preambles);

/// pmf(m) = Pr(M = m | M >= 1) for m >= 1.
using ContenderPmf = std::function<double(std::uint64_t)>;
/// 1 - sum_m (1 - 1/L)^(m-1) pmf(m), truncated once the unexplored mass is
/// below `tail_tol`. Throws ParameterError when the pmf does not sum to one
/// within 1e-9 by `max_terms`.
double ra_epsilon_general(const ContenderPmf& pmf, std::uint64_t preambles, double tail_tol = 1e-12,
                          std::uint64_t max_terms = 10'000'000);

}  // namespace snc
