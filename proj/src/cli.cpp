#include "snc/cli.hpp"

#include "snc/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace snc {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.close();
  if (!file) throw IoError("error writing '" + path + "'");
}

std::string u(std::uint64_t v) { return std::to_string(v); }

std::vector<std::string> base_columns() {
  return {"scheme", "K", "D", "q", "epsilon", "deadlines", "failures", "error_rate", "ci_low", "ci_high", "seed"};
}

std::vector<std::string> base_fields(const Scheme& scheme, double epsilon, std::uint64_t deadlines,
                                     std::uint64_t failures, const Estimate& rate, std::uint64_t seed) {
  const SchemeShape shape = scheme_shape(scheme);
  return {scheme_label(scheme),  std::to_string(shape.slots), std::to_string(shape.delay),
          u(shape.field_size),   format_number(epsilon),      u(deadlines),
          u(failures),           format_number(rate.mean),    format_number(rate.ci_low),
          format_number(rate.ci_high), u(seed)};
}

unsigned default_threads() {
  if (const char* env = std::getenv("SNCLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v <= 1024) return static_cast<unsigned>(v);
    throw ConfigError("SNCLAB_THREADS: expected an integer in [0, 1024], got '" + std::string(env) + "'");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string hist_out;
  std::string trace_out;
  bool gnuplot = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_run_config(a.config, a.sets);
  if (a.seed) cfg.sim.master_seed = *a.seed;
  if (a.threads) {
    cfg.sim.threads = *a.threads;
  } else if (!cfg.threads_set) {
    cfg.sim.threads = default_threads();
  }
  const std::string out_path = a.out.empty() ? cfg.output_path : a.out;
  const std::string hist_path = a.hist_out.empty() ? cfg.histogram_path : a.hist_out;
  std::string trace_path = a.trace_out.empty() ? cfg.trace_path : a.trace_out;
  if (!trace_path.empty()) cfg.sim.trace = true;
  if (cfg.sweep && (!hist_path.empty() || !trace_path.empty())) {
    throw ConfigError("histogram and trace outputs are not available for sweeps");
  }

  const auto start = std::chrono::steady_clock::now();
  std::ostringstream csv;
  if (cfg.sweep) {
    auto cols = base_columns();
    for (const char* c : {"sessions", "failed_sessions", "session_failure_rate", "analytic_exact", "analytic_leading",
                          "analytic_is_upper_bound", "analytic_scope"}) {
      cols.emplace_back(c);
    }
    write_csv_row(csv, cols);
    for (const SweepRow& row : sweep(cfg.sim, cfg.sweep->axis, cfg.sweep->schemes)) {
      auto f = base_fields(row.scheme, row.epsilon, row.deadlines, row.failures, row.deadline_rate, cfg.sim.master_seed);
      f.push_back(u(row.session_failure.n));
      f.push_back(u(row.session_failure.events));
      f.push_back(format_number(row.session_failure.mean));
      f.push_back(row.analytic.exact ? format_number(*row.analytic.exact) : "");
      f.push_back(row.analytic.leading ? format_number(*row.analytic.leading) : "");
      f.push_back(row.analytic.is_upper_bound ? "true" : "false");
      f.push_back(row.analytic.per_session ? "session" : "deadline");
      write_csv_row(csv, f);
    }
    emit(out_path, csv.str(), out);
  } else {
    const Aggregate agg = run_sessions(cfg.sim);
    write_csv_row(csv, base_columns());
    write_csv_row(csv, base_fields(cfg.sim.scheme, cfg.sim.channel.epsilon(), agg.deadlines, agg.failures,
                                   estimate_error_rate(agg), cfg.sim.master_seed));
    emit(out_path, csv.str(), out);
    if (!hist_path.empty()) {
      std::ostringstream h;
      write_csv_row(h, {"retransmissions", "sessions", "probability"});
      const auto probs = retx_histogram(agg);
      for (const auto& [k, count] : agg.retransmission_counts) {
        write_csv_row(h, {u(k), u(count), format_number(probs.at(k))});
      }
      emit(hist_path, h.str(), out);
    }
    if (!trace_path.empty()) {
      std::ostringstream t;
      write_csv_row(t, {"deadline", "failures", "sessions", "rate"});
      const auto rates = error_trace(agg);
      for (std::size_t i = 0; i < rates.size(); ++i) {
        write_csv_row(t, {u(i + 1), u(agg.failures_by_deadline[i]), u(agg.sessions), format_number(rates[i])});
      }
      emit(trace_path, t.str(), out);
    }
  }
  if (cfg.verbosity > 0) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "simulate: " << cfg.sim.channel.describe() << ", " << cfg.sim.sessions << " sessions of "
        << cfg.sim.packets << " packets, " << secs << " s\n";
  }
  if (a.gnuplot) {
    const std::string file = out_path.empty() ? "results.csv" : out_path;
    err << "# gnuplot column hints\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set logscale y\n"
        << "plot '" << file << "' using 5:8 with linespoints, '' using 5:9 with lines, '' using 5:10 with lines\n";
    if (!hist_path.empty()) err << "# histogram: plot '" << hist_path << "' using 1:3 with boxes\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string formula;
  std::map<std::string, std::string> grids;  // parameter -> grid text, when given
  std::string design;
  std::string scheme;
  std::string out;
};

struct FormulaSpec {
  std::vector<std::string> params;  // grid parameters, in output order
  bool needs_design = false;
  bool needs_scheme = false;
  bool upper_bound = false;
  std::vector<std::string> optional = {};  // may be omitted; taken as 0 and left out of `inputs`
};

const std::map<std::string, FormulaSpec>& formulas() {
  static const std::map<std::string, FormulaSpec> table = {
      {"krep_error", {{"eps", "K"}, false, false, false}},
      {"snc_simple_error", {{"eps", "K"}, false, false, true}},
      {"snc_simple_leading", {{"eps", "K"}, false, false, true}},
      {"snc_lemma3_bound", {{"eps"}, true, false, true}},
      {"rlnc_rank_prob", {{"S", "M", "q"}, false, false, false}},
      {"rlnc_rank_prob_nz", {{"S", "M", "q"}, false, false, false}},
      {"rlnc_all_success", {{"N", "M", "eps", "q"}, false, false, false}},
      {"rlnc_all_failure", {{"N", "M", "eps", "q"}, false, false, false}},
      {"krep_all_success", {{"M", "eps", "K"}, false, false, false}},
      {"decode_delay_slots", {{"K", "D", "M"}, false, true, false, {"D", "M"}}},
  };
  return table;
}

std::uint64_t as_count(double v, const std::string& name) {
  if (v < 0 || v != std::floor(v) || v > 1e15) throw ConfigError("--" + name + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto it = formulas().find(a.formula);
  if (it == formulas().end()) {
    std::string names;
    for (const auto& [k, v] : formulas()) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("--formula: unknown formula '" + a.formula + "' (known: " + names + ")");
  }
  const FormulaSpec& spec = it->second;
  for (const auto& [name, text] : a.grids) {
    if (std::find(spec.params.begin(), spec.params.end(), name) == spec.params.end()) {
      throw ConfigError("--" + name + " is not used by " + a.formula);
    }
  }
  std::vector<std::vector<double>> grids;
  std::vector<bool> shown;
  for (const auto& p : spec.params) {
    const auto g = a.grids.find(p);
    const bool optional = std::find(spec.optional.begin(), spec.optional.end(), p) != spec.optional.end();
    if (g == a.grids.end() && !optional) throw ConfigError(a.formula + " requires --" + p);
    grids.push_back(g == a.grids.end() ? std::vector<double>{0.0} : parse_grid(g->second, "--" + p));
    shown.push_back(g != a.grids.end());
  }
  if (spec.needs_design && a.design.empty()) throw ConfigError(a.formula + " requires --design");
  if (!spec.needs_design && !a.design.empty()) throw ConfigError("--design is not used by " + a.formula);
  if (spec.needs_scheme && a.scheme.empty()) throw ConfigError(a.formula + " requires --scheme");
  if (!spec.needs_scheme && !a.scheme.empty()) throw ConfigError("--scheme is not used by " + a.formula);

  std::optional<SncDesign> design;
  if (spec.needs_design) {
    try {
      design = builtin(a.design);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("--design: ") + e.what());
    }
  }
  DelayScheme delay_scheme = DelayScheme::Snc;
  if (spec.needs_scheme) {
    if (a.scheme == "krep") {
      delay_scheme = DelayScheme::KRepetition;
    } else if (a.scheme == "snc") {
      delay_scheme = DelayScheme::Snc;
    } else if (a.scheme == "block_nc") {
      delay_scheme = DelayScheme::BlockNc;
    } else {
      throw ConfigError("--scheme: expected krep, snc or block_nc, got '" + a.scheme + "'");
    }
  }

  std::ostringstream csv;
  write_csv_row(csv, {"formula", "inputs", "value", "is_upper_bound"});
  bool empty = false;
  for (const auto& g : grids) empty = empty || g.empty();
  if (!empty) {
    std::vector<std::size_t> idx(grids.size(), 0);
    while (true) {
      std::map<std::string, double> v;
      std::string inputs;
      for (std::size_t i = 0; i < grids.size(); ++i) {
        v[spec.params[i]] = grids[i][idx[i]];
        if (shown[i]) inputs += (inputs.empty() ? "" : ";") + spec.params[i] + "=" + format_number(grids[i][idx[i]]);
      }
      if (design) inputs += ";design=" + design->name();
      if (spec.needs_scheme) inputs = "scheme=" + a.scheme + ";" + inputs;
      auto count = [&](const std::string& p) { return as_count(v.at(p), p); };
      auto slots = [&](const std::string& p) {
        const auto c = count(p);
        if (c > 1'000'000) throw ConfigError("--" + p + ": too large");
        return static_cast<int>(c);
      };
      double value = 0.0;
      const std::string& f = a.formula;
      try {
        if (f == "krep_error") {
          value = *krep_error(v.at("eps"), slots("K")).exact;
        } else if (f == "snc_simple_error") {
          value = *snc_simple_error(v.at("eps"), slots("K")).exact;
        } else if (f == "snc_simple_leading") {
          value = snc_simple_error(v.at("eps"), slots("K")).leading;
        } else if (f == "snc_lemma3_bound") {
          value = snc_lemma3_bound(v.at("eps"), *design).leading;
        } else if (f == "rlnc_rank_prob") {
          value = rlnc_rank_prob(count("S"), count("M"), static_cast<unsigned>(count("q")));
        } else if (f == "rlnc_rank_prob_nz") {
          value = rlnc_rank_prob_nz(count("S"), count("M"), static_cast<unsigned>(count("q")));
        } else if (f == "rlnc_all_success") {
          value = rlnc_all_success(count("N"), count("M"), v.at("eps"), static_cast<unsigned>(count("q")));
        } else if (f == "rlnc_all_failure") {
          value = rlnc_all_failure(count("N"), count("M"), v.at("eps"), static_cast<unsigned>(count("q")));
        } else if (f == "krep_all_success") {
          const int k = slots("K");
          value = krep_all_success(count("M") * static_cast<std::uint64_t>(k), count("M"), v.at("eps"), k);
        } else {
          value = static_cast<double>(decode_delay_slots(delay_scheme, slots("K"), slots("D"), count("M")));
        }
      } catch (const NotApplicableError& e) {
        throw ConfigError(f + " (" + inputs + "): " + e.what());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(f + " (" + inputs + "): " + e.what());
      }
      write_csv_row(csv, {f, inputs, format_number(value), spec.upper_bound ? "true" : "false"});

      std::size_t d = grids.size();
      for (; d > 0; --d) {
        if (++idx[d - 1] < grids[d - 1].size()) break;
        idx[d - 1] = 0;
      }
      if (d == 0) break;
    }
  }
  emit(a.out, csv.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// channel

struct ChannelArgs {
  bool fbl = false;
  bool ra = false;
  std::optional<double> snr_db;
  std::optional<double> snr_linear;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> nbit;
  std::optional<double> lambda;
  std::optional<std::uint64_t> preambles;
};

int cmd_channel(const ChannelArgs& a, std::ostream& out) {
  if (a.fbl == a.ra) throw ConfigError("select exactly one of --fbl, --ra");
  double eps = 0.0;
  if (a.fbl) {
    if (a.lambda || a.preambles) throw ConfigError("--lambda and --L belong to --ra");
    if (a.snr_db.has_value() == a.snr_linear.has_value()) {
      throw ConfigError("--fbl needs exactly one of --snr-db, --snr-linear");
    }
    if (!a.n || !a.nbit) throw ConfigError("--fbl needs --n and --nbit");
    const double snr = a.snr_db ? std::pow(10.0, *a.snr_db / 10.0) : *a.snr_linear;
    eps = fbl_epsilon(snr, *a.n, *a.nbit);
  } else {
    if (a.snr_db || a.snr_linear || a.n || a.nbit) throw ConfigError("--snr-*, --n and --nbit belong to --fbl");
    if (!a.lambda || !a.preambles) throw ConfigError("--ra needs --lambda and --L");
    eps = ra_epsilon_poisson(*a.lambda, *a.preambles);
  }
  out << format_number(eps) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// designs

struct DesignsArgs {
  std::string name;
  std::string config;
  bool yaml = false;
  std::string out;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_designs(const DesignsArgs& a, std::ostream& out) {
  if (!a.name.empty() && !a.config.empty()) throw ConfigError("give either a design name or --config");
  std::ostringstream text;
  if (a.name.empty() && a.config.empty()) {
    if (a.yaml) throw ConfigError("--yaml needs a design name or --config");
    write_csv_row(text, {"name", "K", "D", "q", "mu", "diagonal", "exponent"});
    for (const auto& name : catalog_names()) {
      const SncDesign d = builtin(name);
      const bool diag = check_diag_condition(d);
      write_csv_row(text, {name, std::to_string(d.slots()), std::to_string(d.delay()), u(d.field_size()),
                           std::to_string(compute_mu(d)), yes_no(diag), diag ? std::to_string(lemma3_exponent(d)) : ""});
    }
    emit(a.out, text.str(), out);
    return kExitOk;
  }

  std::optional<SncDesign> design;
  if (!a.name.empty()) {
    try {
      design = builtin(a.name);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  } else {
    std::ifstream in(a.config);
    if (!in) throw IoError("cannot read config '" + a.config + "'");
    std::ostringstream body;
    body << in.rdbuf();
    design = parse_design(body.str(), a.config);
  }
  if (a.yaml) {
    text << design_to_yaml(*design);
  } else {
    const bool diag = check_diag_condition(*design);
    text << design->name() << ": K=" << design->slots() << " D=" << design->delay() << " q=" << design->field_size()
         << " mu=" << compute_mu(*design) << " diagonal=" << yes_no(diag);
    if (diag) text << " exponent=" << lemma3_exponent(*design);
    text << '\n';
    for (int k = 1; k <= design->slots(); ++k) {
      text << "V_" << k << ",m = " << describe_slot(*design, k) << '\n';
    }
  }
  emit(a.out, text.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sliding network coding experiments", "snclab"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo configuration and write CSV");
  simulate->add_option("config", sim.config, "YAML configuration file")->required();
  simulate->add_option("--set", sim.sets, "Override a config field, e.g. --set channel.epsilon=0.2")
      ->allow_extra_args(false);
  simulate->add_option("--seed", sim.seed, "Master seed override");
  simulate->add_option("--threads", sim.threads, "Worker threads, 0 = all cores (default: $SNCLAB_THREADS)");
  simulate->add_option("--out", sim.out, "CSV output path (default: stdout)");
  simulate->add_option("--hist-out", sim.hist_out, "Retransmission histogram CSV path");
  simulate->add_option("--trace-out", sim.trace_out, "Per-deadline error trace CSV path");
  simulate->add_flag("--gnuplot", sim.gnuplot, "Print gnuplot column hints to stderr");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Evaluate closed-form expressions over parameter grids");
  analyze->add_option("--formula", an.formula, "Formula id")->required();
  std::map<std::string, std::string> grid_text;
  for (const char* p : {"eps", "K", "D", "M", "N", "S", "q"}) {
    analyze->add_option(std::string("--") + p, grid_text[p], "Grid: a,b,c | lin:from:to:count | log:from:to:count");
  }
  analyze->add_option("--design", an.design, "Catalog design name");
  analyze->add_option("--scheme", an.scheme, "krep | snc | block_nc");
  analyze->add_option("--out", an.out, "CSV output path (default: stdout)");

  ChannelArgs ch;
  auto* channel = app.add_subcommand("channel", "Erasure probability of a channel model");
  channel->add_flag("--fbl", ch.fbl, "Finite-blocklength model");
  channel->add_flag("--ra", ch.ra, "Two-step random access model");
  auto* db = channel->add_option("--snr-db", ch.snr_db, "SNR in dB");
  auto* lin = channel->add_option("--snr-linear", ch.snr_linear, "SNR as a linear ratio");
  db->excludes(lin);
  channel->add_option("--n", ch.n, "Channel uses");
  channel->add_option("--nbit", ch.nbit, "Message bits");
  channel->add_option("--lambda", ch.lambda, "Mean number of active devices");
  channel->add_option("--L", ch.preambles, "Number of preambles");

  DesignsArgs ds;
  auto* designs = app.add_subcommand("designs", "List catalog designs or show one design");
  designs->add_option("name", ds.name, "Catalog name, e.g. table3 or simple:3");
  designs->add_option("--config", ds.config, "Read the design from a YAML file");
  designs->add_flag("--yaml", ds.yaml, "Print the design in config form");
  designs->add_option("--out", ds.out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (analyze->parsed()) {
      for (const auto& [k, v] : grid_text) {
        if (analyze->count("--" + k) > 0) an.grids[k] = v;
      }
      return cmd_analyze(an, out);
    }
    if (channel->parsed()) return cmd_channel(ch, out);
    return cmd_designs(ds, out);
  } catch (const ContractViolation& e) {
    err << "snclab: internal error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "snclab: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "snclab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "snclab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "snclab: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace snc
