#include "snc/cli.hpp"

#include "snc/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace snc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_integer(std::string_view s) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Reader {
 public:
  Reader(std::string origin, std::set<std::string> overridden)
      : origin_(std::move(origin)), overridden_(std::move(overridden)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) const {
    std::string where = origin_;
    if (const auto o = override_for(path)) {
      where = "--set " + *o;
    } else if (node.IsDefined() && !node.Mark().is_null()) {
      where += ":" + std::to_string(node.Mark().line + 1);
    }
    throw ConfigError(where + ": " + (path.empty() ? std::string("config") : path) + ": " + msg);
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void allow_keys(const YAML::Node& node, const std::string& path, std::initializer_list<std::string_view> allowed) const {
    require_map(node, path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, child(path, key), "unknown key");
      }
    }
  }

  std::string scalar(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a scalar value");
    return node.Scalar();
  }

  double real(const YAML::Node& node, const std::string& path) const {
    const std::string s = scalar(node, path);
    const auto v = to_double(trim(s));
    if (!v) fail(node, path, "expected a finite number, got '" + s + "'");
    return *v;
  }

  std::int64_t integer(const YAML::Node& node, const std::string& path, std::int64_t lo, std::int64_t hi) const {
    const std::string s = scalar(node, path);
    const auto v = to_integer<std::int64_t>(trim(s));
    if (!v) fail(node, path, "expected an integer, got '" + s + "'");
    if (*v < lo || *v > hi) {
      fail(node, path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + s);
    }
    return *v;
  }

  std::uint64_t u64(const YAML::Node& node, const std::string& path) const {
    const std::string s = scalar(node, path);
    const auto v = to_integer<std::uint64_t>(trim(s));
    if (!v) fail(node, path, "expected a non-negative 64-bit integer, got '" + s + "'");
    return *v;
  }

  bool boolean(const YAML::Node& node, const std::string& path) const {
    const std::string s = scalar(node, path);
    if (s == "true" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "no" || s == "off") return false;
    fail(node, path, "expected true or false, got '" + s + "'");
  }

  std::string choice(const YAML::Node& node, const std::string& path, std::initializer_list<std::string_view> options) const {
    const std::string s = scalar(node, path);
    if (std::find(options.begin(), options.end(), s) != options.end()) return s;
    std::string list;
    for (const auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    fail(node, path, "expected one of {" + list + "}, got '" + s + "'");
  }

  YAML::Node required(const YAML::Node& map, const std::string& path, const std::string& key) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) fail(map, child(path, key), "required");
    return n;
  }

  /// Runs `body`, rewriting a ParameterError as a diagnostic at `node`.
  template <typename F>
  auto guarded(const YAML::Node& node, const std::string& path, F&& body) const {
    try {
      return body();
    } catch (const std::invalid_argument& e) {
      fail(node, path, e.what());
    } catch (const std::domain_error& e) {
      fail(node, path, e.what());
    }
  }

 private:
  std::optional<std::string> override_for(const std::string& path) const {
    for (const auto& o : overridden_) {
      if (path == o || path.starts_with(o + ".") || path.starts_with(o + "[")) return o;
    }
    return std::nullopt;
  }

  std::string origin_;
  std::set<std::string> overridden_;
};

SncDesign read_design_map(const Reader& r, const YAML::Node& node, const std::string& path, bool allow_scheme_keys) {
  if (allow_scheme_keys) {
    r.allow_keys(node, path, {"type", "K", "D", "q", "C", "name"});
  } else {
    r.allow_keys(node, path, {"K", "D", "q", "C", "name"});
  }
  const YAML::Node kn = r.required(node, path, "K");
  const auto K = static_cast<int>(r.integer(kn, child(path, "K"), -1'000'000, 1'000'000));
  const YAML::Node dn = node["D"];
  const YAML::Node qn = node["q"];
  const YAML::Node cn = node["C"];
  if (!cn.IsDefined()) {
    if (dn.IsDefined() || qn.IsDefined()) r.fail(node, child(path, "C"), "required when D or q is given");
    return r.guarded(kn, child(path, "K"), [&] { return builtin("simple:" + std::to_string(K)); });
  }
  if (!dn.IsDefined()) r.fail(node, child(path, "D"), "required");
  const auto D = static_cast<int>(r.integer(dn, child(path, "D"), -1'000'000, 1'000'000));
  const auto q = qn.IsDefined() ? static_cast<unsigned>(r.integer(qn, child(path, "q"), 0, 1 << 20)) : 2u;

  const std::string cpath = child(path, "C");
  if (!cn.IsSequence()) r.fail(cn, cpath, "expected a list of rows");
  std::vector<std::vector<unsigned>> rows;
  for (std::size_t i = 0; i < cn.size(); ++i) {
    const YAML::Node row = cn[i];
    if (!row.IsSequence()) r.fail(row, index_path(cpath, i), "expected a list of coefficients");
    std::vector<unsigned> values;
    for (std::size_t j = 0; j < row.size(); ++j) {
      values.push_back(static_cast<unsigned>(r.integer(row[j], index_path(index_path(cpath, i), j), 0, 255)));
    }
    rows.push_back(std::move(values));
  }
  std::string name = "custom";
  if (node["name"].IsDefined()) name = r.scalar(node["name"], child(path, "name"));

  try {
    auto matrix = CoefficientMatrix::from_rows(rows);
    if (rows.empty()) matrix.cols = static_cast<std::size_t>(std::max(D, 0));
    return SncDesign::create(K, D, q, std::move(matrix), name);
  } catch (const std::exception& e) {
    // Point at the field the message names.
    const std::string msg = e.what();
    const std::string head = msg.substr(0, msg.find_first_of(" :"));
    if (head == "K") r.fail(kn, child(path, "K"), msg);
    if (head == "D" && dn.IsDefined()) r.fail(dn, child(path, "D"), msg);
    if (head == "q" && qn.IsDefined()) r.fail(qn, child(path, "q"), msg);
    if (head == "C") r.fail(cn, cpath, msg);
    r.fail(node, path, msg);
  }
}

SncDesign read_design(const Reader& r, const YAML::Node& node, const std::string& path) {
  if (node.IsScalar()) {
    return r.guarded(node, path, [&] { return builtin(node.Scalar()); });
  }
  return read_design_map(r, node, path, false);
}

// scheme: {type: snc, design: ...} or {type: snc, K, D, q, C}
SncDesign read_snc(const Reader& r, const YAML::Node& node, const std::string& path) {
  if (node["design"].IsDefined()) {
    r.allow_keys(node, path, {"type", "design"});
    return read_design(r, node["design"], child(path, "design"));
  }
  return read_design_map(r, node, path, true);
}

std::uint64_t read_batch(const Reader& r, const YAML::Node& node, const std::string& path) {
  return node["batch"].IsDefined() ? r.u64(node["batch"], child(path, "batch")) : 0;
}

unsigned read_field_size(const Reader& r, const YAML::Node& node, const std::string& path) {
  if (!node["q"].IsDefined()) return 2;
  const YAML::Node qn = node["q"];
  const auto q = static_cast<unsigned>(r.integer(qn, child(path, "q"), 0, 1 << 20));
  r.guarded(qn, child(path, "q"), [&] { return &Field::of_size(q); });
  return q;
}

int read_slots(const Reader& r, const YAML::Node& node, const std::string& path, int fallback, int lo) {
  if (!node["K"].IsDefined()) return fallback;
  return static_cast<int>(r.integer(node["K"], child(path, "K"), lo, 1'000'000));
}

Scheme read_scheme(const Reader& r, const YAML::Node& node, const std::string& path) {
  r.require_map(node, path);
  const std::string type = r.choice(r.required(node, path, "type"), child(path, "type"), {"krep", "snc", "block_nc"});
  if (type == "krep") {
    r.allow_keys(node, path, {"type", "K"});
    return KRepScheme{read_slots(r, node, path, 3, 1)};
  }
  if (type == "snc") return SncScheme{read_snc(r, node, path)};
  r.allow_keys(node, path, {"type", "K", "batch", "q", "exclude_zero"});
  BlockNcScheme s;
  s.repetitions = read_slots(r, node, path, 3, 1);
  s.batch = read_batch(r, node, path);
  s.field_size = read_field_size(r, node, path);
  if (node["exclude_zero"].IsDefined()) s.exclude_zero = r.boolean(node["exclude_zero"], child(path, "exclude_zero"));
  return s;
}

ChannelModel read_channel(const Reader& r, const YAML::Node& node, const std::string& path) {
  r.require_map(node, path);
  const std::string type = r.choice(r.required(node, path, "type"), child(path, "type"), {"fixed", "fbl", "ra"});
  if (type == "fixed") {
    r.allow_keys(node, path, {"type", "epsilon"});
    const YAML::Node e = r.required(node, path, "epsilon");
    const double eps = r.real(e, child(path, "epsilon"));
    return r.guarded(e, child(path, "epsilon"), [&] { return ChannelModel::fixed(eps); });
  }
  if (type == "fbl") {
    r.allow_keys(node, path, {"type", "snr_db", "snr_linear", "n", "nbit"});
    const YAML::Node db = node["snr_db"];
    const YAML::Node lin = node["snr_linear"];
    if (db.IsDefined() == lin.IsDefined()) r.fail(node, child(path, "snr_db"), "give exactly one of snr_db, snr_linear");
    const double snr = db.IsDefined() ? std::pow(10.0, r.real(db, child(path, "snr_db")) / 10.0)
                                      : r.real(lin, child(path, "snr_linear"));
    FiniteBlocklength m;
    m.snr = snr;
    m.channel_uses = r.u64(r.required(node, path, "n"), child(path, "n"));
    m.message_bits = r.u64(r.required(node, path, "nbit"), child(path, "nbit"));
    return r.guarded(node, path, [&] { return ChannelModel(m); });
  }
  r.allow_keys(node, path, {"type", "lambda", "L"});
  RandomAccess m;
  m.load = r.real(r.required(node, path, "lambda"), child(path, "lambda"));
  m.preambles = r.u64(r.required(node, path, "L"), child(path, "L"));
  return r.guarded(node, path, [&] { return ChannelModel(m); });
}

std::vector<double> read_grid(const Reader& r, const YAML::Node& node, const std::string& path) {
  if (node.IsSequence()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(r.real(node[i], index_path(path, i)));
    return out;
  }
  if (node.IsScalar()) {
    try {
      return parse_grid(node.Scalar(), path);
    } catch (const ConfigError& e) {
      r.fail(node, path, e.what());
    }
  }
  if (node.IsMap()) {
    r.allow_keys(node, path, {"lin", "log"});
    if (node.size() != 1) r.fail(node, path, "give exactly one of lin, log");
    const auto kv = *node.begin();
    const std::string kind = kv.first.as<std::string>();
    const std::string sub = child(path, kind);
    if (!kv.second.IsSequence() || kv.second.size() != 3) r.fail(kv.second, sub, "expected [from, to, count]");
    std::ostringstream text;
    text.precision(17);
    text << kind << ":" << r.real(kv.second[0], index_path(sub, 0)) << ":" << r.real(kv.second[1], index_path(sub, 1))
         << ":" << r.integer(kv.second[2], index_path(sub, 2), 0, 10'000'000);
    try {
      return parse_grid(text.str(), sub);
    } catch (const ConfigError& e) {
      r.fail(node, sub, e.what());
    }
  }
  r.fail(node, path, "expected a list of numbers, a grid string or {lin|log: [from, to, count]}");
}

SchemeFamily read_family(const Reader& r, const YAML::Node& node, const std::string& path, SweepAxisKind axis) {
  r.require_map(node, path);
  const std::string type = r.choice(r.required(node, path, "type"), child(path, "type"),
                                    {"krep", "snc_simple", "snc_min_delay", "snc", "block_nc"});
  if (type == "krep") {
    r.allow_keys(node, path, {"type", "K"});
    return KRepFamily{read_slots(r, node, path, 3, 1)};
  }
  if (type == "snc_simple") {
    r.allow_keys(node, path, {"type", "K"});
    return SncSimpleFamily{read_slots(r, node, path, 3, 2)};
  }
  if (type == "snc_min_delay") {
    r.allow_keys(node, path, {"type", "K", "q"});
    return SncMinDelayFamily{read_slots(r, node, path, 3, 2), read_field_size(r, node, path)};
  }
  if (type == "snc") {
    if (axis == SweepAxisKind::Slots) r.fail(node, path, "a fixed SNC design cannot be swept over K");
    return SncFixedFamily{read_snc(r, node, path)};
  }
  r.allow_keys(node, path, {"type", "K", "batch", "q", "exclude_zero"});
  BlockNcFamily f;
  f.repetitions = read_slots(r, node, path, 3, 1);
  f.batch = read_batch(r, node, path);
  f.field_size = read_field_size(r, node, path);
  if (node["exclude_zero"].IsDefined()) f.exclude_zero = r.boolean(node["exclude_zero"], child(path, "exclude_zero"));
  return f;
}

SweepSpec read_sweep(const Reader& r, const YAML::Node& node, const std::string& path) {
  r.allow_keys(node, path, {"axis", "values", "schemes"});
  SweepSpec spec;
  const std::string axis = r.choice(r.required(node, path, "axis"), child(path, "axis"), {"epsilon", "K"});
  spec.axis.kind = axis == "epsilon" ? SweepAxisKind::Epsilon : SweepAxisKind::Slots;
  const std::string vpath = child(path, "values");
  const YAML::Node values = r.required(node, path, "values");
  spec.axis.values = read_grid(r, values, vpath);
  for (std::size_t i = 0; i < spec.axis.values.size(); ++i) {
    const double v = spec.axis.values[i];
    if (spec.axis.kind == SweepAxisKind::Epsilon && !(v >= 0.0 && v <= 1.0)) {
      r.fail(values, vpath, "epsilon values must be in [0, 1]");
    }
    if (spec.axis.kind == SweepAxisKind::Slots && (v != std::floor(v) || v < 1 || v > 64)) {
      r.fail(values, vpath, "K values must be integers in [1, 64]");
    }
  }
  const YAML::Node schemes = r.required(node, path, "schemes");
  const std::string spath = child(path, "schemes");
  if (!schemes.IsSequence()) r.fail(schemes, spath, "expected a list of schemes");
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    spec.schemes.push_back(read_family(r, schemes[i], index_path(spath, i), spec.axis.kind));
  }
  if (spec.axis.kind == SweepAxisKind::Slots) {
    for (std::size_t i = 0; i < spec.schemes.size(); ++i) {
      if (!std::holds_alternative<SncSimpleFamily>(spec.schemes[i]) &&
          !std::holds_alternative<SncMinDelayFamily>(spec.schemes[i])) {
        continue;
      }
      for (const double v : spec.axis.values) {
        if (v < 2) r.fail(values, vpath, "SNC families need K >= 2");
      }
    }
  }
  return spec;
}

// "sweep.schemes.0.K" -> {"sweep", "schemes", "0", "K"}
std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string apply_override(YAML::Node& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected key=value, got '" + spec + "'");
  const std::string key = trim(spec.substr(0, eq));
  const std::string text = spec.substr(eq + 1);
  const auto parts = split_key(key);
  for (const auto& p : parts) {
    if (p.empty()) throw ConfigError("--set: malformed key '" + key + "'");
  }
  YAML::Node value;
  try {
    value = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("--set " + key + ": cannot parse value: " + e.msg);
  }
  if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);

  std::string normalized;
  YAML::Node cur = root;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& part = parts[i];
    const bool last = i + 1 == parts.size();
    if (cur.IsSequence()) {
      const auto idx = to_integer<std::size_t>(part);
      if (!idx || *idx >= cur.size()) throw ConfigError("--set " + key + ": no element '" + part + "'");
      normalized += "[" + part + "]";
      if (last) {
        cur[*idx] = value;
      } else {
        YAML::Node next = cur[*idx];
        cur.reset(next);
      }
      continue;
    }
    normalized += (normalized.empty() ? "" : ".") + part;
    if (last) {
      cur[part] = value;
    } else {
      YAML::Node next = cur[part];
      if (!next.IsMap() && !next.IsSequence()) next = YAML::Node(YAML::NodeType::Map);
      cur.reset(next);
    }
  }
  return normalized;
}

}  // namespace

std::vector<double> parse_grid(std::string_view raw, std::string_view field) {
  const std::string text = trim(raw);
  const std::string name(field);
  if (text.empty()) return {};
  auto number = [&](std::string_view s) {
    const auto v = to_double(trim(s));
    if (!v) throw ConfigError(name + ": bad number '" + std::string(s) + "'");
    return *v;
  };
  if (text.starts_with("lin:") || text.starts_with("log:")) {
    const bool log = text.starts_with("log:");
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : text.substr(4)) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw ConfigError(name + ": expected " + text.substr(0, 3) + ":from:to:count");
    const double from = number(parts[0]);
    const double to = number(parts[1]);
    const auto count = to_integer<std::int64_t>(trim(parts[2]));
    if (!count || *count < 0) throw ConfigError(name + ": count must be a non-negative integer");
    if (log && (from <= 0.0 || to <= 0.0)) throw ConfigError(name + ": log grid bounds must be > 0");
    std::vector<double> out;
    for (std::int64_t i = 0; i < *count; ++i) {
      const double f = *count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(*count - 1);
      double v = log ? std::exp(std::log(from) + f * (std::log(to) - std::log(from))) : from + f * (to - from);
      if (i == 0) v = from;
      if (i + 1 == *count && *count > 1) v = to;
      out.push_back(v);
    }
    return out;
  }
  std::vector<double> out;
  std::string cur;
  for (const char c : text) {
    if (c == ',') {
      out.push_back(number(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(number(cur));
  return out;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    const int line = e.mark.is_null() ? 0 : e.mark.line + 1;
    throw ConfigError(origin + (line ? ":" + std::to_string(line) : std::string()) + ": " + e.msg);
  }
  std::set<std::string> overridden;
  for (const auto& o : overrides) overridden.insert(apply_override(root, o));
  const Reader r(origin, overridden);
  if (!root.IsDefined() || root.IsNull()) r.fail(root, "", "empty configuration");
  r.allow_keys(root, "", {"scheme", "channel", "session", "seed", "decoder", "threads", "trace", "output", "sweep"});

  RunConfig cfg;
  SimConfig& sim = cfg.sim;
  if (root["sweep"].IsDefined()) {
    cfg.sweep = read_sweep(r, root["sweep"], "sweep");
    if (root["scheme"].IsDefined()) r.fail(root["scheme"], "scheme", "not used together with sweep");
  } else {
    sim.scheme = read_scheme(r, r.required(root, "", "scheme"), "scheme");
  }
  if (root["channel"].IsDefined()) {
    sim.channel = read_channel(r, root["channel"], "channel");
  } else if (!cfg.sweep || cfg.sweep->axis.kind != SweepAxisKind::Epsilon) {
    r.fail(root, "channel", "required");
  }

  if (const YAML::Node s = root["session"]; s.IsDefined()) {
    r.allow_keys(s, "session", {"packets", "sessions", "payload_len"});
    if (s["packets"].IsDefined()) sim.packets = r.u64(s["packets"], "session.packets");
    if (s["sessions"].IsDefined()) sim.sessions = r.u64(s["sessions"], "session.sessions");
    if (s["payload_len"].IsDefined()) {
      sim.payload_len = static_cast<std::size_t>(r.integer(s["payload_len"], "session.payload_len", 1, 1 << 20));
    }
    if (sim.packets < 1) r.fail(s["packets"], "session.packets", "must be >= 1");
    if (sim.sessions < 1) r.fail(s["sessions"], "session.sessions", "must be >= 1");
  }
  if (root["seed"].IsDefined()) sim.master_seed = r.u64(root["seed"], "seed");
  if (root["decoder"].IsDefined()) {
    sim.decoder = r.choice(root["decoder"], "decoder", {"full_ge", "paper_rule"}) == "full_ge"
                      ? DecoderMode::FullGaussian
                      : DecoderMode::PaperRule;
  }
  if (root["threads"].IsDefined()) {
    sim.threads = static_cast<unsigned>(r.integer(root["threads"], "threads", 0, 1024));
    cfg.threads_set = true;
  }
  if (root["trace"].IsDefined()) sim.trace = r.boolean(root["trace"], "trace");
  if (const YAML::Node o = root["output"]; o.IsDefined()) {
    r.allow_keys(o, "output", {"path", "histogram", "trace", "verbosity"});
    if (o["path"].IsDefined()) cfg.output_path = r.scalar(o["path"], "output.path");
    if (o["histogram"].IsDefined()) {
      cfg.histogram_path = r.scalar(o["histogram"], "output.histogram");
    }
    if (o["trace"].IsDefined()) {
      cfg.trace_path = r.scalar(o["trace"], "output.trace");
      sim.trace = true;
    }
    if (o["verbosity"].IsDefined()) cfg.verbosity = static_cast<int>(r.integer(o["verbosity"], "output.verbosity", 0, 3));
  }

  if (const auto* b = std::get_if<BlockNcScheme>(&sim.scheme); b && !cfg.sweep && b->batch > sim.packets) {
    r.fail(root["scheme"]["batch"], "scheme.batch", "must not exceed session.packets");
  }
  if (cfg.sweep) {
    for (std::size_t i = 0; i < cfg.sweep->schemes.size(); ++i) {
      const auto* b = std::get_if<BlockNcFamily>(&cfg.sweep->schemes[i]);
      if (b && b->batch > sim.packets) {
        const std::string p = index_path("sweep.schemes", i);
        r.fail(root["sweep"]["schemes"][i]["batch"], p + ".batch", "must not exceed session.packets");
      }
    }
  }
  r.guarded(root, "config", [&] {
    validate(sim);
    return 0;
  });
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error reading config '" + path + "'");
  return parse_run_config(text.str(), path, overrides);
}

SncDesign parse_design(const std::string& yaml_text, const std::string& origin) {
  YAML::Node node;
  try {
    node = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.msg);
  }
  const Reader r(origin, {});
  if (node.IsMap() && node["scheme"].IsDefined()) {
    // A full run configuration: take the SNC scheme's design.
    const YAML::Node s = node["scheme"];
    r.require_map(s, "scheme");
    if (r.scalar(r.required(s, "scheme", "type"), "scheme.type") != "snc") {
      r.fail(s["type"], "scheme.type", "not an snc scheme");
    }
    return read_snc(r, s, "scheme");
  }
  if (node.IsMap() && node["design"].IsDefined()) {
    r.allow_keys(node, "", {"design"});
    return read_design(r, node["design"], "design");
  }
  return read_design(r, node, "design");
}

std::string design_to_yaml(const SncDesign& design) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << design.name();
  out << YAML::Key << "K" << YAML::Value << design.slots();
  out << YAML::Key << "D" << YAML::Value << design.delay();
  out << YAML::Key << "q" << YAML::Value << design.field_size();
  out << YAML::Key << "C" << YAML::Value << YAML::BeginSeq;
  const auto& c = design.coefficients();
  for (std::size_t row = 0; row < c.rows; ++row) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const Symbol v : c.row(row)) out << static_cast<unsigned>(v);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace snc
