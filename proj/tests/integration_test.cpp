// Runs the snclab binary as a subprocess.

#include "snc/cli.hpp"
#include "snc/design.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run snclab(const std::string& args) {
  const std::string cmd = std::string("\"") + SNCLAB_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string("\"") + CONFIG_DIR + "/" + name + "\""; }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Scratch {
  fs::path dir = fs::temp_directory_path() / "snclab_integration";
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return path(name);
  }
};

}  // namespace

TEST_CASE("shipped configurations run") {
  Scratch s;
  const std::string hist = " --hist-out \"" + s.path("h.csv") + "\"";
  for (const char* name : {"snc_simple3.yaml", "table3_fbl.yaml", "retx_krep3.yaml", "block_nc.yaml"}) {
    const auto r = snclab("simulate " + config(name) + " --set session.sessions=50" + hist);
    CHECK_MESSAGE(r.code == 0, name);
    CHECK(lines(r.out) == 2);
  }
  const auto eps = snclab("simulate " + config("sweep_eps.yaml") + " --set session.sessions=20");
  CHECK(eps.code == 0);
  CHECK(lines(eps.out) == 1 + 7 * 3);
  const auto k = snclab("simulate " + config("sweep_k.yaml") + " --set session.sessions=20");
  CHECK(k.code == 0);
  CHECK(lines(k.out) == 1 + 5 * 2);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string args = "simulate " + config("table3_fbl.yaml") + " --set session.sessions=200";
  const auto a = snclab(args + " --threads 1");
  const auto b = snclab(args + " --threads 8");
  const auto c = snclab(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("thread count from the environment") {
  const std::string args = "simulate " + config("snc_simple3.yaml") + " --set session.sessions=100";
  const auto a = snclab(args);
  const auto env = snclab(args + " --threads 0");
  CHECK(a.out == env.out);
  const std::string with_env = std::string("SNCLAB_THREADS=4 \"") + SNCLAB_PATH + "\" " + args;
  FILE* pipe = popen(with_env.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  CHECK(pclose(pipe) == 0);
  CHECK(out == a.out);
}

TEST_CASE("exit codes") {
  Scratch s;
  CHECK(snclab("--help").code == 0);
  CHECK(snclab("").code == 2);
  CHECK(snclab("simulate").code == 2);
  CHECK(snclab("simulate \"" + s.path("absent.yaml") + "\"").code == 3);
  const auto bad = s.write("bad.yaml", "scheme: {type: snc, K: 1}\nchannel: {type: fixed, epsilon: 0.1}\n");
  CHECK(snclab("simulate \"" + bad + "\"").code == 2);
  CHECK(snclab("simulate " + config("snc_simple3.yaml") + " --set session.sessions=1 --out \"" +
               s.path("missing/dir/out.csv") + "\"")
            .code == 3);
  CHECK(snclab("analyze --formula krep_error --eps 0.1").code == 2);
  CHECK(snclab("channel --fbl --ra").code == 2);
  CHECK(snclab("designs nosuch").code == 2);
}

TEST_CASE("design listing round trip") {
  Scratch s;
  const auto yaml = snclab("designs --config " + config("table3_fbl.yaml") + " --yaml");
  REQUIRE(yaml.code == 0);
  CHECK(snc::parse_design(yaml.out, "listing") == snc::builtin("table3"));
  const auto file = s.write("d.yaml", yaml.out);
  const auto again = snclab("designs --config \"" + file + "\" --yaml");
  CHECK(again.out == yaml.out);
  const auto listing = snclab("designs");
  CHECK(listing.out.find("\ntable3,4,2,2,4,yes,6\n") != std::string::npos);
}

TEST_CASE("analysis output") {
  const auto r = snclab("analyze --formula snc_simple_error --eps log:0.01:0.1:2 --K 2,3");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 5);
  CHECK(r.out.find("snc_simple_error,eps=0.1;K=3,3.61e-05,true") != std::string::npos);
  const auto ch = snclab("channel --ra --lambda 1 --L 100");
  CHECK(ch.code == 0);
  CHECK(std::stod(ch.out) == doctest::Approx(5.8e-3).epsilon(0.01));
}
