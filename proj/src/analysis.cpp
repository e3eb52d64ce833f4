#include "snc/analysis.hpp"

#include "snc/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

namespace snc {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must be in [0, 1]");
}

void check_field(unsigned q) {
  if (q < 2) throw ParameterError("q must be >= 2");
}

// C(n, s) (1-eps)^s eps^(n-s), with the log-space binomial.
double binomial_pmf(std::uint64_t n, std::uint64_t s, double epsilon) {
  if (epsilon == 0.0) return s == n ? 1.0 : 0.0;
  if (epsilon == 1.0) return s == 0 ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  const double ds = static_cast<double>(s);
  const double log_choose = std::lgamma(dn + 1.0) - std::lgamma(ds + 1.0) - std::lgamma(dn - ds + 1.0);
  return std::exp(log_choose + ds * std::log1p(-epsilon) + (dn - ds) * std::log(epsilon));
}

// 1 - rlnc_rank_prob(s, m, q) without cancellation.
double rank_deficit(std::uint64_t received, std::uint64_t packets, unsigned q) {
  if (received < packets) return 1.0;
  double log_prob = 0.0;
  const double lq = std::log(static_cast<double>(q));
  for (std::uint64_t n = 0; n < packets; ++n) {
    log_prob += std::log1p(-std::exp(-lq * static_cast<double>(received - n)));
  }
  return -std::expm1(log_prob);
}

void check_rlnc_batch(std::uint64_t coded, std::uint64_t packets, double epsilon, unsigned q) {
  check_epsilon(epsilon);
  check_field(q);
  if (packets < 1) throw ParameterError("M must be >= 1");
  if (coded < packets) throw ParameterError("N must be >= M");
}

}  // namespace

ErrorEstimate krep_error(double epsilon, int repetitions) {
  check_epsilon(epsilon);
  if (repetitions < 1) throw ParameterError("K must be >= 1");
  const double value = std::pow(epsilon, repetitions);
  return {value, value, repetitions, false};
}

double rlnc_rank_prob(std::uint64_t received, std::uint64_t packets, unsigned field_size) {
  check_field(field_size);
  if (packets < 1) throw ParameterError("M must be >= 1");
  if (received < packets) return 0.0;
  // q^-(S-n) <= 1/2, so 1 - q^-(S-n) has no cancellation; for q = 2^w
  // both terms are exact in binary.
  const double q = static_cast<double>(field_size);
  double prob = 1.0;
  for (std::uint64_t n = 0; n < packets; ++n) {
    prob *= 1.0 - std::pow(q, -static_cast<double>(received - n));
  }
  return prob;
}

double rlnc_rank_prob_nz(std::uint64_t received, std::uint64_t packets, unsigned field_size) {
  check_field(field_size);
  if (packets < 1) throw ParameterError("M must be >= 1");
  if (received > 64 || packets > 16 || field_size > 256) {
    throw ParameterError("rlnc_rank_prob_nz supports S <= 64, M <= 16, q <= 256 (got S=" + std::to_string(received) +
                         ", M=" + std::to_string(packets) + ", q=" + std::to_string(field_size) + ")");
  }
  if (received < packets) return 0.0;

  const cpp_int q = field_size;
  // U(m, n) = prod_{j<m} (q^n - q^j)
  auto full_rank_count = [&](std::uint64_t m, std::uint64_t n) {
    cpp_int count = 1;
    const cpp_int qn = boost::multiprecision::pow(q, static_cast<unsigned>(n));
    cpp_int qj = 1;
    for (std::uint64_t j = 0; j < m; ++j) {
      count *= qn - qj;
      qj *= q;
    }
    return count;
  };

  cpp_int numerator = 0;
  cpp_int choose = 1;  // C(S, n)
  for (std::uint64_t n = 0; n <= received - packets; ++n) {
    const cpp_int term = choose * full_rank_count(packets, received - n);
    if (n % 2 == 0) {
      numerator += term;
    } else {
      numerator -= term;
    }
    choose = choose * (received - n) / (n + 1);
  }
  const cpp_int nonzero = boost::multiprecision::pow(q, static_cast<unsigned>(packets)) - 1;
  const cpp_int denominator = boost::multiprecision::pow(nonzero, static_cast<unsigned>(received));
  const cpp_rational ratio(numerator, denominator);
  return ratio.convert_to<double>();
}

double rlnc_all_success(std::uint64_t coded, std::uint64_t packets, double epsilon, unsigned field_size) {
  check_rlnc_batch(coded, packets, epsilon, field_size);
  double total = 0.0;
  for (std::uint64_t s = packets; s <= coded; ++s) {
    total += rlnc_rank_prob(s, packets, field_size) * binomial_pmf(coded, s, epsilon);
  }
  return total;
}

double rlnc_all_failure(std::uint64_t coded, std::uint64_t packets, double epsilon, unsigned field_size) {
  check_rlnc_batch(coded, packets, epsilon, field_size);
  double total = 0.0;
  for (std::uint64_t s = 0; s <= coded; ++s) {
    total += rank_deficit(s, packets, field_size) * binomial_pmf(coded, s, epsilon);
  }
  return total;
}

double krep_all_success(std::uint64_t coded, std::uint64_t packets, double epsilon, int repetitions) {
  check_epsilon(epsilon);
  if (repetitions < 1) throw ParameterError("K must be >= 1");
  if (packets < 1) throw ParameterError("M must be >= 1");
  if (coded != packets * static_cast<std::uint64_t>(repetitions)) {
    throw ParameterError("N must equal M*K for K-repetition (N=" + std::to_string(coded) + ", M=" +
                         std::to_string(packets) + ", K=" + std::to_string(repetitions) + ")");
  }
  return std::pow(1.0 - std::pow(epsilon, repetitions), static_cast<double>(packets));
}

ErrorEstimate snc_simple_error(double epsilon, int slots) {
  check_epsilon(epsilon);
  if (slots < 2) throw ParameterError("K must be >= 2");
  const double pair_loss = epsilon * (2.0 - epsilon);  // 1 - (1-eps)^2
  ErrorEstimate est;
  est.exact = std::pow(epsilon, slots) * std::pow(pair_loss, slots - 1);
  est.exponent = 2 * slots - 1;
  est.leading = std::ldexp(std::pow(epsilon, est.exponent), slots - 1);
  est.is_upper_bound = true;
  return est;
}

ErrorEstimate snc_lemma3_bound(double epsilon, const SncDesign& design) {
  check_epsilon(epsilon);
  const int exponent = lemma3_exponent(design);
  ErrorEstimate est;
  est.exponent = exponent;
  est.leading = std::ldexp(std::pow(epsilon, exponent), design.delay());
  est.is_upper_bound = true;
  return est;
}

std::uint64_t decode_delay_slots(DelayScheme scheme, int slots, int delay, std::uint64_t packets) {
  if (slots < 1) throw ParameterError("K must be >= 1");
  const auto k = static_cast<std::uint64_t>(slots);
  switch (scheme) {
    case DelayScheme::KRepetition:
      return k;
    case DelayScheme::Snc:
      if (delay < 1) throw ParameterError("D must be >= 1");
      return k * static_cast<std::uint64_t>(delay + 1);
    case DelayScheme::BlockNc:
      if (packets < 1) throw ParameterError("M must be >= 1");
      return 2 * packets * k;
  }
  throw ParameterError("unknown scheme");
}

}  // namespace snc
