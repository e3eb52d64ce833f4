// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit
// status is nonzero when any criterion fails.
//
// usage: acceptance SNCLAB_BINARY CONFIG_DIR

#include "snc/analysis.hpp"
#include "snc/channel.hpp"
#include "snc/design.hpp"
#include "snc/sim.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace snc;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kSigmas = 3.0;
constexpr double kSignificantDigits = 6;

struct Check {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Check()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %2d: %s  %s | %s [%.1fs]\n", id, c.pass ? "PASS" : "FAIL", title.c_str(), c.detail.c_str(),
              secs);
  std::fflush(stdout);
  failures += !c.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SimConfig base(Scheme scheme, double eps, std::uint64_t packets, std::uint64_t sessions, std::uint64_t seed) {
  SimConfig c;
  c.scheme = std::move(scheme);
  c.channel = ChannelModel::fixed(eps);
  c.packets = packets;
  c.sessions = sessions;
  c.payload_len = 1;
  c.master_seed = seed;
  c.threads = 0;
  return c;
}

// Observed rate within k standard errors of `expected` (errors taken at the expected rate).
bool within(double observed, double expected, std::uint64_t n, double k, double* z = nullptr) {
  const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(n));
  if (z) *z = (observed - expected) / sigma;
  return std::abs(observed - expected) <= k * sigma;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Check criterion1() {
  const auto e = estimate_error_rate(base(KRepScheme{3}, 0.1, 1000, 10000, 101));
  double z;
  const bool ok = e.n >= 10'000'000 && within(e.mean, 1e-3, e.n, kSigmas, &z);
  return {ok, fmt("rate %.6g over %llu deadlines, z = %.2f", e.mean, (unsigned long long)e.n, z)};
}

Check criterion2() {
  const double want = *snc_simple_error(0.1, 3).exact;
  auto cfg = base(SncScheme{builtin("simple:3")}, 0.1, 1000, 100000, 202);
  cfg.decoder = DecoderMode::PaperRule;
  const auto rule = estimate_error_rate(cfg);
  cfg.decoder = DecoderMode::FullGaussian;
  const auto full = estimate_error_rate(cfg);
  double z;
  const bool match = rule.n >= 100'000'000 && within(rule.mean, want, rule.n, kSigmas, &z);
  const bool dominated = full.n >= 100'000'000 && full.mean <= rule.mean;
  return {match && dominated, fmt("paper_rule %.6g (expected %.6g, z = %.2f), full_ge %.6g, %llu deadlines each",
                                  rule.mean, want, z, full.mean, (unsigned long long)rule.n)};
}

Check criterion3() {
  const auto e = estimate_error_rate(base(SncScheme{builtin("table3")}, 0.2, 1000, 10000, 303));
  const double bound = snc_lemma3_bound(0.2, builtin("table3")).leading;
  const bool ok = e.n >= 10'000'000 && e.mean <= bound && e.events > 0;
  return {ok, fmt("rate %.6g (%llu failures in %llu deadlines), bound %.6g", e.mean, (unsigned long long)e.events,
                  (unsigned long long)e.n, bound)};
}

// Rank of each S x M binary matrix by bitmask elimination.
Check criterion4() {
  int mismatches = 0;
  int cases = 0;
  for (unsigned M = 1; M <= 3; ++M) {
    for (unsigned S = M; S <= 5; ++S) {
      std::uint64_t full = 0, full_nz = 0, total_nz = 0;
      const std::uint64_t total = 1ull << (S * M);
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<unsigned> rows(S);
        bool zero_row = false;
        for (unsigned r = 0; r < S; ++r) {
          rows[r] = (mask >> (r * M)) & ((1u << M) - 1);
          zero_row = zero_row || rows[r] == 0;
        }
        unsigned rank = 0;
        for (unsigned bit = 0; bit < M; ++bit) {
          unsigned p = rank;
          while (p < S && !((rows[p] >> bit) & 1u)) ++p;
          if (p == S) continue;
          std::swap(rows[p], rows[rank]);
          for (unsigned r = 0; r < S; ++r)
            if (r != rank && ((rows[r] >> bit) & 1u)) rows[r] ^= rows[rank];
          ++rank;
        }
        full += rank == M;
        if (!zero_row) {
          ++total_nz;
          full_nz += rank == M;
        }
      }
      ++cases;
      mismatches += rlnc_rank_prob(S, M, 2) != double(full) / double(total);
      mismatches += rlnc_rank_prob_nz(S, M, 2) != double(full_nz) / double(total_nz);
    }
  }
  const double a = rlnc_rank_prob(2, 2, 2);
  const double b = rlnc_rank_prob_nz(2, 2, 2);
  const bool ok = mismatches == 0 && a == 0.375 && b == 2.0 / 3.0;
  return {ok, fmt("%d (S, M) cases, %d mismatches; (2,2,2): %.12g and %.12g", cases, mismatches, a, b)};
}

Check criterion5() {
  const double nc_low = rlnc_all_failure(15, 5, 1e-3, 4);
  const double kr_low = 1 - krep_all_success(15, 5, 1e-3, 3);
  const double nc_high = rlnc_all_failure(30, 10, 0.1, 4);
  const double kr_high = 1 - krep_all_success(30, 10, 0.1, 3);
  const bool analytic = nc_low > kr_low && nc_high < kr_high;

  const std::uint64_t sessions = 200000;
  const auto nc = run_sessions(base(BlockNcScheme{3, 0, 4, false}, 0.1, 10, sessions, 505));
  const auto kr = run_sessions(base(KRepScheme{3}, 0.1, 10, sessions, 506));
  const double nc_sim = estimate_session_failure(nc).mean;
  const double kr_sim = estimate_session_failure(kr).mean;
  double z_nc, z_kr;
  const bool sim = within(nc_sim, nc_high, sessions, kSigmas, &z_nc) && within(kr_sim, kr_high, sessions, kSigmas, &z_kr);
  return {analytic && sim && nc_sim < kr_sim,
          fmt("eps=1e-3, M=5: NC %.4g > rep %.4g; eps=0.1, M=10: NC %.4g < rep %.4g; simulated NC %.4g (z = %.2f), "
              "rep %.4g (z = %.2f)",
              nc_low, kr_low, nc_high, kr_high, nc_sim, z_nc, kr_sim, z_kr)};
}

Check criterion6() {
  const std::uint64_t sessions = 100000;
  const double want = 1 - std::pow(1 - 1e-3, 100);
  const auto kr = estimate_session_failure(run_sessions(base(KRepScheme{3}, 0.1, 100, sessions, 606)));
  const auto sn = estimate_session_failure(run_sessions(base(SncScheme{builtin("simple:3")}, 0.1, 100, sessions, 607)));
  double z;
  const bool ok = within(kr.mean, want, sessions, kSigmas, &z) && sn.mean < 4e-3;
  return {ok, fmt("repetition P(>=1) %.5g (expected %.5g, z = %.2f), SNC P(>=1) %.5g [CI %.3g, %.3g], %llu sessions",
                  kr.mean, want, z, sn.mean, sn.ci_low, sn.ci_high, (unsigned long long)sessions)};
}

Check criterion7() {
  // 0.1 has no exact binary form; the slack absorbs its representation error.
  auto min_k = [](auto&& rate) {
    int K = 1;
    while (rate(K) > 1e-6 * (1 + 1e-12)) ++K;
    return K;
  };
  const int kr = min_k([](int K) { return *krep_error(0.1, K).exact; });
  const int sn = min_k([](int K) { return K < 2 ? 1.0 : *snc_simple_error(0.1, K).exact; });
  return {kr == 6 && sn == 4, fmt("repetition needs K = %d, SNC needs K = %d", kr, sn)};
}

Check criterion8() {
  // Random access: Poisson arrivals, uniform preamble choice, tagged device active.
  const double eps = ra_epsilon_poisson(1.0, 100);
  std::mt19937_64 gen(808);
  std::poisson_distribution<int> poisson(1.0);
  std::uniform_int_distribution<int> preamble(0, 99);
  const std::uint64_t trials = 10'000'000;
  std::uint64_t lost = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    int m;
    do m = poisson(gen);
    while (m == 0);
    const int mine = preamble(gen);
    bool hit = false;
    for (int j = 1; j < m; ++j) hit |= preamble(gen) == mine;
    lost += hit;
  }
  double z;
  const bool ra_ok = within(double(lost) / double(trials), eps, trials, kSigmas, &z);

  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big rho = 1, n = 100, bits = 50;
  const Big log2e = 1 / boost::multiprecision::log(Big(2));
  const Big V = rho * (2 + rho) / ((1 + rho) * (1 + rho)) * log2e * log2e;
  const Big arg = boost::multiprecision::sqrt(n / V) * (boost::multiprecision::log(1 + rho) * log2e - bits / n);
  const Big q = boost::math::erfc(arg / boost::multiprecision::sqrt(Big(2))) / 2;
  const double oracle = q.convert_to<double>();
  const double got = fbl_epsilon(1.0, 100, 50);
  const bool fbl_ok = std::abs(got - oracle) <= 0.5 * std::pow(10.0, -kSignificantDigits + 1) * oracle;
  const bool q0 = qfunc(0.0) == 0.5;
  return {ra_ok && fbl_ok && q0,
          fmt("RA %.6g vs Monte Carlo %.6g (z = %.2f); FBL %.10g vs %.10g; Q(0) = %.17g", eps,
              double(lost) / double(trials), z, got, oracle, qfunc(0.0))};
}

Check criterion9(const std::string& snclab, const fs::path& configs) {
  const fs::path dir = fs::temp_directory_path() / "snclab_acceptance";
  fs::create_directories(dir);
  struct Run {
    std::string config;
    std::string extra;
    bool histogram;
  };
  const std::vector<Run> runs{
      {"snc_simple3.yaml", "--set session.sessions=300", true},
      {"table3_fbl.yaml", "--set session.sessions=300", true},
      {"retx_krep3.yaml", "--set session.sessions=2000", true},
      {"block_nc.yaml", "--set session.sessions=2000", true},
      {"sweep_eps.yaml", "--set session.sessions=100", false},
      {"sweep_k.yaml", "--set session.sessions=100", false},
  };
  int identical = 0;
  std::string bad;
  for (const auto& r : runs) {
    std::string out[2];
    for (int i = 0; i < 2; ++i) {
      const std::string threads = i == 0 ? "1" : "8";
      const fs::path csv = dir / (r.config + "." + threads + ".csv");
      const fs::path hist = dir / (r.config + "." + threads + ".hist.csv");
      std::string cmd = "cd \"" + dir.string() + "\" && \"" + snclab + "\" simulate \"" +
                        (configs / r.config).string() + "\" " + r.extra + " --threads " + threads + " --out \"" +
                        csv.string() + "\"";
      if (r.histogram) cmd += " --hist-out \"" + hist.string() + "\"";
      if (std::system(cmd.c_str()) != 0) bad += r.config + " (exit) ";
      out[i] = slurp(csv) + (r.histogram ? slurp(hist) : "");
    }
    if (!out[0].empty() && out[0] == out[1]) {
      ++identical;
    } else {
      bad += r.config + " ";
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(runs.size()),
          fmt("%d of %zu configurations byte-identical at 1 and 8 threads%s%s", identical, runs.size(),
              bad.empty() ? "" : "; differing: ", bad.c_str())};
}

Check criterion10() {
  const auto a = decode_delay_slots(DelayScheme::Snc, 3, 2, 0);
  const auto b = decode_delay_slots(DelayScheme::Snc, 4, 2, 0);
  const auto c = decode_delay_slots(DelayScheme::BlockNc, 3, 0, 6);
  const auto d = decode_delay_slots(DelayScheme::BlockNc, 4, 0, 6);
  const auto e = decode_delay_slots(DelayScheme::KRepetition, 6, 0, 0);
  return {a == 9 && b == 12 && c == 36 && d == 48 && e == 6,
          fmt("%llu/%llu/%llu/%llu/%llu", (unsigned long long)a, (unsigned long long)b, (unsigned long long)c,
              (unsigned long long)d, (unsigned long long)e)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s SNCLAB_BINARY CONFIG_DIR\n", argv[0]);
    return 2;
  }
  const std::string snclab = argv[1];
  const fs::path configs = argv[2];

  report(1, "K-repetition rate at eps=0.1, K=3", criterion1);
  report(2, "simple:3 exact rate and decoder dominance", criterion2);
  report(3, "table3 rate under its bound at eps=0.2", criterion3);
  report(4, "rank probabilities by enumeration", criterion4);
  report(5, "block coding vs repetition ordering", criterion5);
  report(6, "retransmission probabilities at M=100", criterion6);
  report(7, "K needed for a 1e-6 target", criterion7);
  report(8, "channel formulas", criterion8);
  report(9, "thread-count determinism", [&] { return criterion9(snclab, configs); });
  report(10, "decoding delay in slots", criterion10);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
