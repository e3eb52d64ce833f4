#include "snc/codec.hpp"

#include "snc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

using namespace snc;

namespace {

// erased(block, slot) for 1-based slots.
using Pattern = std::function<bool(DataIndex, int)>;

struct Truth {
  std::vector<Payload> data;  // X_1 .. X_M
  Payload zeros;
  PayloadAccessor accessor() const {
    return [this](DataIndex j) -> std::span<const Symbol> {
      if (j < 1 || j > static_cast<DataIndex>(data.size())) return zeros;
      return data[static_cast<std::size_t>(j - 1)];
    };
  }
};

Truth random_truth(const SncDesign& d, std::size_t M, std::size_t len, std::uint64_t seed) {
  RandomStream rng(seed);
  Truth t;
  t.zeros.assign(len, 0);
  t.data.assign(M, Payload(len));
  for (auto& x : t.data) rng.fill_bits(x, d.field().degree());
  return t;
}

std::vector<ReceivedPacket> through(const std::vector<CodedPacket>& sent, const Pattern& erased) {
  std::vector<ReceivedPacket> out;
  for (const auto& p : sent) out.push_back(erased(p.block, p.slot) ? ReceivedPacket::lost(p.block, p.slot)
                                                                    : ReceivedPacket::intact(p));
  return out;
}

// Full session; returns per-deadline success and checks every decoded payload.
std::vector<bool> run(const SncDesign& d, DecoderMode mode, std::size_t M, std::size_t len, const Pattern& erased,
                      std::uint64_t seed = 5, std::size_t* max_window = nullptr) {
  const auto truth = random_truth(d, M, len, seed);
  const auto src = truth.accessor();
  SncReceiver rx(d, len, mode, src, static_cast<DataIndex>(M));
  std::vector<bool> ok;
  for (DataIndex b = 1; b <= static_cast<DataIndex>(M) + d.delay(); ++b) {
    rx.ingest(through(snc_encode_block(d, b, src, len), erased));
    if (max_window) *max_window = std::max(*max_window, rx.window_size());
    if (b <= d.delay()) continue;
    const auto out = rx.decode_deadline(b - d.delay());
    REQUIRE(out.index == b - d.delay());
    REQUIRE(out.decoded() == out.payload.has_value());
    REQUIRE(out.used_genie == !out.decoded());
    if (out.decoded()) REQUIRE(*out.payload == truth.data[static_cast<std::size_t>(out.index - 1)]);
    ok.push_back(out.decoded());
  }
  return ok;
}

Pattern bernoulli(double eps, std::uint64_t seed) {
  auto rng = std::make_shared<RandomStream>(seed);
  auto memo = std::make_shared<std::map<std::pair<DataIndex, int>, bool>>();
  return [=](DataIndex b, int k) {
    auto [it, fresh] = memo->try_emplace({b, k}, false);
    if (fresh) it->second = rng->bernoulli(eps);
    return it->second;
  };
}

// Exact steady-state failure probability of one deadline, by enumerating
// every erasure pattern of the blocks that can carry X_t.
double exact_deadline_failure(const SncDesign& d, DecoderMode mode, double eps, int first_rel) {
  const int K = d.slots();
  const int D = d.delay();
  const DataIndex t = 2 * D + 2;
  const int blocks = D + 1 - first_rel;  // blocks t+first_rel .. t+D
  const int n = K * blocks;
  double fail = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const Pattern erased = [&](DataIndex b, int k) {
      const DataIndex rel = b - t - first_rel;
      if (rel < 0 || rel >= blocks) return false;
      return ((mask >> (rel * K + (k - 1))) & 1u) != 0;
    };
    const auto ok = run(d, mode, static_cast<std::size_t>(t + 2 * D), 1, erased, mask);
    if (!ok[static_cast<std::size_t>(t - 1)]) {
      const int e = std::popcount(mask);
      fail += std::pow(eps, e) * std::pow(1 - eps, n - e);
    }
  }
  return fail;
}

CodedPacket rlnc_packet(const std::vector<unsigned>& coeffs) {
  CodedPacket p;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i]) p.combo.add(static_cast<DataIndex>(i + 1), static_cast<Symbol>(coeffs[i]));
  p.payload.assign(1, 0);
  return p;
}

}  // namespace

TEST_CASE("encoder examples") {
  const auto t1 = builtin("table1");
  const std::vector<Payload> x{{1}, {1}};
  const PayloadAccessor h = [&](DataIndex j) -> std::span<const Symbol> { return x[static_cast<std::size_t>(j - 1)]; };
  const auto b2 = snc_encode_block(t1, 2, h, 1);
  CHECK(b2[1].payload == Payload{0});
  CHECK(b2[1].combo == SymbolicCombo{{1, 1}, {2, 1}});

  const auto t3 = builtin("table3");
  const std::vector<Payload> y{{1}, {0}, {1}};  // X_{m-2}, X_{m-1}, X_m with m = 3
  const PayloadAccessor hy = [&](DataIndex j) -> std::span<const Symbol> {
    return y[static_cast<std::size_t>(j - 1)];
  };
  const auto b3 = snc_encode_block(t3, 3, hy, 1);
  CHECK(b3[1].payload == Payload{0});
  CHECK(b3[2].payload == Payload{1});
  CHECK(b3[3].payload == Payload{0});

  const Payload zero(4, 0);
  const PayloadAccessor hz = [&](DataIndex) -> std::span<const Symbol> { return zero; };
  for (DataIndex m = 1; m < 6; ++m)
    for (const auto& p : snc_encode_block(t3, m, hz, 4)) CHECK(p.payload == zero);

  const PayloadAccessor missing = [](DataIndex) -> std::span<const Symbol> { return {}; };
  CHECK_THROWS_AS(snc_encode_block(t3, 3, missing, 1), ContractViolation);
}

TEST_CASE("encoded payloads are the combos applied to the data") {
  for (const char* name : {"table1", "table3", "simple:4", "mindelay:6:4", "mindelay:20:16"}) {
    const auto d = builtin(name);
    const auto truth = random_truth(d, 30, 5, 11);
    for (DataIndex m = 1; m <= 30; ++m) {
      const auto block = snc_encode_block(d, m, truth.accessor(), 5);
      const auto combos = expand_block(d, m);
      for (std::size_t k = 0; k < block.size(); ++k) {
        CHECK(block[k].combo == combos[k]);
        Payload want(5, 0);
        for (const auto& t : combos[k].terms()) d.field().axpy_inplace(t.coeff, truth.accessor()(t.index), want);
        CHECK(block[k].payload == want);
      }
    }
  }
}

TEST_CASE("worked decoding example") {
  // Erasures of V_{1,m}, V_{3,m}, V_{4,m-1}, V_{1,m-2} and V_{2,m-2}, with m = 6.
  const auto t3 = builtin("table3");
  const DataIndex m = 6;
  const Pattern erased = [&](DataIndex b, int k) {
    return (b == m && (k == 1 || k == 3)) || (b == m - 1 && k == 4) || (b == m - 2 && (k == 1 || k == 2));
  };
  for (auto mode : {DecoderMode::FullGaussian, DecoderMode::PaperRule}) {
    const auto ok = run(t3, mode, 10, 3, erased);
    CHECK(ok[static_cast<std::size_t>(m - 2 - 1)]);
  }

  // Losing the two packets that carry X_{m-2} with only FD partners breaks the paper_rule decoder.
  const Pattern worse = [&](DataIndex b, int k) { return erased(b, k) || (b == m - 1 && k == 3) || (b == m - 2 && k == 4); };
  CHECK_FALSE(run(t3, DecoderMode::PaperRule, 10, 3, worse)[static_cast<std::size_t>(m - 3)]);
}

TEST_CASE("ingest peels with recovered packets") {
  const auto t3 = builtin("table3");
  const auto truth = random_truth(t3, 10, 2, 3);
  const auto src = truth.accessor();
  SncReceiver rx(t3, 2, DecoderMode::FullGaussian, src, 10);
  const DataIndex m = 4;
  for (DataIndex b = 1; b <= m; ++b) {
    Pattern erased = [&](DataIndex, int) { return false; };
    if (b == m - 1) erased = [](DataIndex, int) { return true; };
    if (b == m) erased = [](DataIndex, int k) { return k != 3; };
    const auto sent = snc_encode_block(t3, b, src, 2);
    rx.ingest(through(sent, erased));
    if (b == m - 1) {
      CHECK(rx.is_recovered_nfd(m - 2));
      CHECK_FALSE(rx.is_known(m - 1));
    }
    if (b == m) {
      REQUIRE(rx.is_recovered_nfd(m - 1));
      const auto p = *rx.known_payload(m - 1);
      CHECK(Payload(p.begin(), p.end()) == truth.data[m - 2]);
    }
    if (b > 2) rx.decode_deadline(b - 2);
  }

  // A received slot-1 packet is recovered immediately.
  SncReceiver rx2(t3, 2, DecoderMode::FullGaussian, src, 10);
  rx2.ingest(through(snc_encode_block(t3, 1, src, 2), [](DataIndex, int k) { return k != 1; }));
  CHECK(rx2.is_recovered_nfd(1));
}

TEST_CASE("receiver contract checks") {
  const auto t3 = builtin("table3");
  const auto truth = random_truth(t3, 10, 2, 3);
  const auto src = truth.accessor();
  const Pattern none = [](DataIndex, int) { return false; };
  SncReceiver rx(t3, 2, DecoderMode::FullGaussian, src, 10);
  CHECK_THROWS_AS(rx.ingest(through(snc_encode_block(t3, 2, src, 2), none)), ContractViolation);
  rx.ingest(through(snc_encode_block(t3, 1, src, 2), none));
  CHECK_THROWS_AS(rx.decode_deadline(1), ContractViolation);  // block 3 not yet ingested
  rx.ingest(through(snc_encode_block(t3, 2, src, 2), none));
  rx.ingest(through(snc_encode_block(t3, 3, src, 2), none));
  CHECK_THROWS_AS(rx.decode_deadline(2), ContractViolation);
  CHECK_THROWS_AS(rx.ingest(through(snc_encode_block(t3, 4, src, 2), none)), ContractViolation);  // X_1 pending
  CHECK(rx.decode_deadline(1).decoded());
}

TEST_CASE("lossless channel round trip") {
  const Pattern none = [](DataIndex, int) { return false; };
  for (const char* name : {"table1", "table2", "table3", "simple:6", "mindelay:9:4", "mindelay:5:256"})
    for (auto mode : {DecoderMode::FullGaussian, DecoderMode::PaperRule})
      for (std::size_t len : {1u, 8u}) {
        const auto ok = run(builtin(name), mode, 40, len, none);
        CHECK(ok.size() == 40);
        CHECK(std::count(ok.begin(), ok.end(), true) == 40);
      }

  const Pattern all = [](DataIndex, int) { return true; };
  const auto lost = run(builtin("table3"), DecoderMode::FullGaussian, 10, 2, all);
  CHECK(std::count(lost.begin(), lost.end(), true) == 0);
}

TEST_CASE("full elimination dominates the paper_rule decoder pathwise") {
  for (const char* name : {"table1", "table2", "table3", "simple:3", "simple:5", "mindelay:7:2", "mindelay:6:4"}) {
    const auto d = builtin(name);
    for (double eps : {0.1, 0.3, 0.5}) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        std::size_t window = 0;
        const auto full = run(d, DecoderMode::FullGaussian, 60, 2, bernoulli(eps, s), 9, &window);
        const auto rule = run(d, DecoderMode::PaperRule, 60, 2, bernoulli(eps, s), 9);
        for (std::size_t i = 0; i < full.size(); ++i)
          if (rule[i]) CHECK(full[i]);
        CHECK(window <= static_cast<std::size_t>(d.slots() * (d.delay() + 1)));
      }
    }
  }
}

TEST_CASE("decoding is payload-length invariant") {
  for (const char* name : {"table3", "mindelay:6:4"}) {
    const auto d = builtin(name);
    for (auto mode : {DecoderMode::FullGaussian, DecoderMode::PaperRule}) {
      const auto a = run(d, mode, 80, 1, bernoulli(0.35, 4), 1);
      const auto b = run(d, mode, 80, 16, bernoulli(0.35, 4), 2);
      CHECK(a == b);
    }
  }
}

TEST_CASE("paper_rule decoder on the simple design is exact") {
  const double eps = 0.1;
  for (int K : {2, 3}) {
    const auto d = builtin("simple:" + std::to_string(K));
    const double rule = exact_deadline_failure(d, DecoderMode::PaperRule, eps, 0);
    const double lemma = std::pow(eps, K) * std::pow(1 - std::pow(1 - eps, 2), K - 1);
    CHECK(rule == doctest::Approx(lemma).epsilon(1e-12));
    const double full = exact_deadline_failure(d, DecoderMode::FullGaussian, eps, -d.delay());
    CHECK(full <= lemma * (1 + 1e-12));
  }
}

TEST_CASE("K-repetition") {
  const Payload x{7, 1, 200};
  const auto copies = krep_encode(3, 4, x);
  REQUIRE(copies.size() == 3);
  for (const auto& c : copies) {
    CHECK(c.payload == x);
    CHECK(c.combo == SymbolicCombo{{4, 1}});
    CHECK(c.block == 4);
  }
  CHECK(krep_encode(1, 1, x).size() == 1);

  std::vector<ReceivedPacket> rx{ReceivedPacket::lost(4, 1), ReceivedPacket::intact(copies[1]),
                                 ReceivedPacket::lost(4, 3)};
  const auto out = krep_decode(rx);
  CHECK(out.decoded());
  CHECK(*out.payload == x);
  CHECK(out.index == 4);
  rx[1] = ReceivedPacket::lost(4, 2);
  CHECK_FALSE(krep_decode(rx).decoded());
}

TEST_CASE("RLNC decoding matches full-rank counts exhaustively") {
  const Field& f = Field::of_size(2);
  for (std::size_t M = 1; M <= 3; ++M) {
    for (std::size_t S = M; S <= 5; ++S) {
      const std::size_t bits = S * M;
      std::uint64_t full = 0;
      for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
        std::vector<ReceivedPacket> rx;
        for (std::size_t r = 0; r < S; ++r) {
          std::vector<unsigned> c(M);
          for (std::size_t j = 0; j < M; ++j) c[j] = (mask >> (r * M + j)) & 1u;
          rx.push_back(ReceivedPacket::intact(rlnc_packet(c)));
        }
        full += rlnc_decode(rx, M, f).success;
      }
      // prod_{i<M} (2^S - 2^i) full-column-rank S x M binary matrices.
      std::uint64_t want = 1;
      for (std::size_t i = 0; i < M; ++i) want *= (1ull << S) - (1ull << i);
      CHECK(full == want);
      if (S == 2 && M == 2) CHECK(static_cast<double>(full) / 16.0 == 0.375);
    }
  }
}

TEST_CASE("RLNC round trip and rank deficits") {
  RandomStream rng(17);
  const Field& f = Field::of_size(16);
  std::vector<Payload> data(5, Payload(6));
  for (auto& x : data) rng.fill_bits(x, 4);
  const auto coded = rlnc_encode(data, 15, f, rng, false, 11);
  CHECK(coded.size() == 15);
  std::vector<ReceivedPacket> rx;
  for (const auto& c : coded) rx.push_back(ReceivedPacket::intact(c));
  const auto res = rlnc_decode(rx, 5, f, 11);
  REQUIRE(res.success);
  CHECK(res.consistent);
  for (std::size_t i = 0; i < 5; ++i) CHECK(*res.payloads[i] == data[i]);

  rx.resize(4);
  const auto short_res = rlnc_decode(rx, 5, f, 11);
  CHECK_FALSE(short_res.success);
  CHECK(short_res.rank <= 4);

  std::vector<ReceivedPacket> unit;
  for (std::size_t i = 0; i < 5; ++i) {
    CodedPacket p;
    p.combo.add(static_cast<DataIndex>(i + 1), 1);
    p.payload = data[i];
    unit.push_back(ReceivedPacket::intact(p));
  }
  unit.push_back(ReceivedPacket::lost(0, 1));
  CHECK(rlnc_decode(unit, 5, f).success);
}

TEST_CASE("RLNC coefficients are uniform") {
  RandomStream rng(99);
  const Field& f = Field::of_size(4);
  const std::vector<Payload> data(2, Payload(1, 0));
  std::array<double, 4> counts{};
  double total = 0;
  for (int i = 0; i < 125000; ++i) {
    for (const auto& p : rlnc_encode(data, 4, f, rng, false)) {
      for (DataIndex j = 1; j <= 2; ++j) counts[p.combo.coefficient(j)] += 1;
      total += 2;
    }
  }
  double chi2 = 0;
  for (double c : counts) {
    CHECK(std::abs(c / total - 0.25) < 0.01 * 0.25 * 4);
    chi2 += (c - total / 4) * (c - total / 4) / (total / 4);
  }
  CHECK(chi2 < 16.27);  // 3 degrees of freedom, p = 0.001

  const Field& f2 = Field::of_size(2);
  const std::vector<Payload> one(1, Payload{5});
  int empty = 0;
  for (const auto& p : rlnc_encode(one, 1000, f2, rng, false)) empty += p.combo.empty();
  CHECK(empty > 400);
  CHECK(empty < 600);
  for (const auto& p : rlnc_encode(one, 1000, f2, rng, true)) {
    CHECK(p.combo == SymbolicCombo{{1, 1}});
    CHECK(p.payload == Payload{5});
  }
}
