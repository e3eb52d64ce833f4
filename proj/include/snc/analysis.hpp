#pragma once

#include "snc/design.hpp"

#include <cstdint>
#include <optional>

namespace snc {

/// Closed-form error figure for one scheme at one erasure probability.
struct ErrorEstimate {
  std::optional<double> exact;
  double leading = 0.0;  ///< leading-order term
  int exponent = 0;      ///< power of epsilon in the leading term
  bool is_upper_bound = false;
};

/// epsilon^K.
ErrorEstimate krep_error(double epsilon, int repetitions);

/// Pr(S uniformly random vectors of GF(q)^M have rank M); 0 when S < M.
double rlnc_rank_prob(std::uint64_t received, std::uint64_t packets, unsigned field_size);

/// Same with all-zero coefficient vectors excluded, by exact inclusion-
/// exclusion on big integers. Sizes are limited to S <= 64, M <= 16,
/// q <= 256; larger arguments throw ParameterError.
double rlnc_rank_prob_nz(std::uint64_t received, std::uint64_t packets, unsigned field_size);

/// Probability that all M packets decode from N = MK random coded packets.
double rlnc_all_success(std::uint64_t coded, std::uint64_t packets, double epsilon, unsigned field_size);
/// 1 - rlnc_all_success, summed directly to keep precision at small values.
double rlnc_all_failure(std::uint64_t coded, std::uint64_t packets, double epsilon, unsigned field_size);

/// (1 - epsilon^K)^M; throws ParameterError unless N = MK.
double krep_all_success(std::uint64_t coded, std::uint64_t packets, double epsilon, int repetitions);

/// epsilon^K (1 - (1-epsilon)^2)^(K-1), leading 2^(K-1) epsilon^(2K-1).
ErrorEstimate snc_simple_error(double epsilon, int slots);

/// 2^D epsilon^(mu+D) for designs meeting the diagonal condition.
ErrorEstimate snc_lemma3_bound(double epsilon, const SncDesign& design);

enum class DelayScheme { KRepetition, Snc, BlockNc };

/// Worst-case decoding delay in slots: K, K(D+1) or 2MK.
std::uint64_t decode_delay_slots(DelayScheme scheme, int slots, int delay, std::uint64_t packets);

}  // namespace snc
