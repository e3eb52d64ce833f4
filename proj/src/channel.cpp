#include "snc/channel.hpp"

#include "snc/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace snc {

namespace {

void validate(const FixedErasure& m) {
  if (!(m.epsilon >= 0.0 && m.epsilon <= 1.0)) throw ParameterError("epsilon must be in [0, 1]");
}
void validate(const FiniteBlocklength& m) {
  if (!(m.snr > 0.0) || !std::isfinite(m.snr)) throw ParameterError("snr must be a positive linear ratio");
  if (m.channel_uses < 1) throw ParameterError("n (channel uses) must be >= 1");
  if (m.message_bits < 1) throw ParameterError("nbit (message bits) must be >= 1");
}
void validate(const RandomAccess& m) {
  if (!(m.load > 0.0) || !std::isfinite(m.load)) throw ParameterError("lambda must be > 0");
  if (m.preambles < 2) throw ParameterError("L (preambles) must be >= 2");
}

double resolve(const FixedErasure& m) { return m.epsilon; }
double resolve(const FiniteBlocklength& m) { return fbl_epsilon(m.snr, m.channel_uses, m.message_bits); }
double resolve(const RandomAccess& m) { return ra_epsilon_poisson(m.load, m.preambles); }

}  // namespace

ChannelModel::ChannelModel(Variant model) : model_(std::move(model)) {
  std::visit([](const auto& m) { validate(m); }, model_);
  epsilon_ = std::visit([](const auto& m) { return resolve(m); }, model_);
}

std::string ChannelModel::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FixedErasure>) {
          os << "fixed(eps=" << m.epsilon << ")";
        } else if constexpr (std::is_same_v<T, FiniteBlocklength>) {
          os << "fbl(snr=" << m.snr << ",n=" << m.channel_uses << ",nbit=" << m.message_bits << ")";
        } else {
          os << "ra(lambda=" << m.load << ",L=" << m.preambles << ")";
        }
      },
      model_);
  return os.str();
}

ReceivedPacket erase(const ChannelModel& channel, RandomStream& rng, CodedPacket packet) {
  if (draw_erasure(channel.epsilon(), rng)) return ReceivedPacket::lost(packet.block, packet.slot);
  return ReceivedPacket::intact(std::move(packet));
}

double channel_dispersion(double snr) {
  const double log2e = std::numbers::log2e;
  return snr * (2.0 + snr) / ((1.0 + snr) * (1.0 + snr)) * log2e * log2e;
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double fbl_epsilon(double snr, std::uint64_t channel_uses, std::uint64_t message_bits) {
  validate(FiniteBlocklength{snr, channel_uses, message_bits});
  const double n = static_cast<double>(channel_uses);
  const double gap = std::log2(1.0 + snr) - static_cast<double>(message_bits) / n;
  return qfunc(std::sqrt(n / channel_dispersion(snr)) * gap);
}

double ra_epsilon_poisson(double load, std::uint64_t preambles) {
  validate(RandomAccess{load, preambles});
  const double l = static_cast<double>(preambles);
  // e^{-lambda/L} - e^{-lambda} = e^{-lambda} (e^{lambda (1 - 1/L)} - 1)
  const double numerator = std::exp(-load) * std::expm1(load * (1.0 - 1.0 / l));
  const double denominator = -std::expm1(-load) * (1.0 - 1.0 / l);
  return 1.0 - numerator / denominator;
}

double ra_epsilon_general(const ContenderPmf& pmf, std::uint64_t preambles, double tail_tol,
                          std::uint64_t max_terms) {
  if (preambles < 2) throw ParameterError("L (preambles) must be >= 2");
  const double keep = 1.0 - 1.0 / static_cast<double>(preambles);
  double mass = 0.0;
  double success = 0.0;
  double weight = 1.0;  // (1 - 1/L)^(m-1)
  for (std::uint64_t m = 1; m <= max_terms; ++m) {
    const double p = pmf(m);
    if (p < 0.0 || !std::isfinite(p)) throw ParameterError("pmf must be a finite non-negative function");
    mass += p;
    success += weight * p;
    weight *= keep;
    if (mass > 1.0 + 1e-9) throw ParameterError("pmf mass exceeds 1");
    if (1.0 - mass < tail_tol) break;
  }
  if (std::abs(1.0 - mass) > 1e-9) throw ParameterError("pmf is not normalized within 1e-9");
  return 1.0 - success;
}

}  // namespace snc
