#include "nsframe/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string_view>

#include "nsframe/error.hpp"

namespace nsframe {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& path) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw InputError("unknown key '" + path + "." + it.key() + "'");
  }
}

const json& at(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError("missing key '" + path + "." + key + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

double number_at(const json& j, const char* key, const std::string& path) {
  return number(at(j, key, path), path + "." + key);
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return number(*it, path + "." + key);
}

std::string string_at(const json& j, const char* key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval_from(const json& v, const std::string& path) {
  const auto xs = numbers(v, path);
  if (xs.size() != 2 || !(xs[0] < xs[1])) fail(path, "expected a nonempty interval [lo, hi]");
  return {xs[0], xs[1]};
}

// Elementary families take their center from `center`; combinators act on
// absolute time and accept no center or dilation.
WindowSpec parse_window(const json& j, const std::string& path, std::optional<double> center) {
  const std::string name = string_at(j, "family", path);
  const auto family = parse_window_family(name);
  if (!family) fail(path + ".family", "unknown window family '" + name + "'");
  const json params = j.contains("params") ? j.at("params") : json::object();
  const std::string pp = path + ".params";
  const double c = center.value_or(optional_number(j, "center", path).value_or(0.0));
  const double d = optional_number(j, "dilation", path).value_or(1.0);
  const bool combinator =
      *family == WindowFamily::convolution || *family == WindowFamily::truncation;
  if (combinator && (j.contains("dilation") || (!center && j.contains("center"))))
    fail(path, "combinator windows take no center or dilation");
  if (!(d > 0.0)) fail(path + ".dilation", "must be positive");

  switch (*family) {
    case WindowFamily::hann:
      check_keys(params, {}, pp);
      return WindowSpec::hann(c, d);
    case WindowFamily::gaussian:
      check_keys(params, {"alpha"}, pp);
      return WindowSpec::gaussian(number_at(params, "alpha", pp), c, d);
    case WindowFamily::raised_cosine_band:
      check_keys(params, {"omega"}, pp);
      return WindowSpec::raised_cosine_band(number_at(params, "omega", pp), c, d);
    case WindowFamily::indicator:
      check_keys(params, {"interval"}, pp);
      return WindowSpec::indicator(interval_from(at(params, "interval", pp), pp + ".interval"), c, d);
    case WindowFamily::convolution:
      check_keys(params, {"first", "second"}, pp);
      return WindowSpec::convolution(window_from_json(at(params, "first", pp), pp + ".first"),
                                     window_from_json(at(params, "second", pp), pp + ".second"));
    case WindowFamily::truncation:
      check_keys(params, {"inner", "interval"}, pp);
      return WindowSpec::truncation(window_from_json(at(params, "inner", pp), pp + ".inner"),
                                    interval_from(at(params, "interval", pp), pp + ".interval"));
  }
  fail(path, "unsupported window family");
}

std::vector<NsgEntry> entries_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of windows");
  std::vector<NsgEntry> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    check_keys(v[i], {"family", "params", "center", "dilation", "b"}, p);
    const double a = number_at(v[i], "center", p);
    const double b = number_at(v[i], "b", p);
    if (!(b > 0.0)) fail(p + ".b", "must be positive");
    out.push_back({parse_window(v[i], p, a), a, b});
  }
  return out;
}

json entries_to_json(const std::vector<NsgEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) {
    json w = window_to_json(e.window);
    const auto f = e.window.family();
    if (f != WindowFamily::convolution && f != WindowFamily::truncation &&
        e.window.center() != e.center)
      throw InputError("cannot serialize a window whose center differs from a_k");
    w["center"] = e.center;
    w["b"] = e.b;
    out.push_back(std::move(w));
  }
  return out;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_bytes(std::istream& is, int n, const std::string& path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), n)) fail(path, "file is truncated");
  std::uint64_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

WindowSpec window_from_json(const json& j, const std::string& path) {
  check_keys(j, {"family", "params", "center", "dilation"}, path);
  return parse_window(j, path, std::nullopt);
}

json window_to_json(const WindowSpec& spec) {
  json j;
  j["family"] = std::string(to_string(spec.family()));
  json params = json::object();
  switch (spec.family()) {
    case WindowFamily::hann: break;
    case WindowFamily::gaussian: params["alpha"] = spec.alpha(); break;
    case WindowFamily::raised_cosine_band: params["omega"] = spec.omega(); break;
    case WindowFamily::indicator:
      params["interval"] = {spec.interval().lo, spec.interval().hi};
      break;
    case WindowFamily::convolution:
      params["first"] = window_to_json(spec.first());
      params["second"] = window_to_json(spec.second());
      break;
    case WindowFamily::truncation:
      params["inner"] = window_to_json(spec.first());
      params["interval"] = {spec.interval().lo, spec.interval().hi};
      break;
  }
  j["params"] = std::move(params);
  if (spec.family() != WindowFamily::convolution && spec.family() != WindowFamily::truncation) {
    j["center"] = spec.center();
    j["dilation"] = spec.dilation();
  }
  return j;
}

SystemConfig parse_config(const json& j) {
  const std::string root = "config";
  check_keys(j,
             {"schema", "dt", "L", "windows", "delta", "b_range", "profiles", "reference",
              "reference_windows", "scale_sequence", "existence"},
             root);
  const auto& schema = at(j, "schema", root);
  if (!schema.is_number_integer() || schema.get<int>() != kConfigSchema)
    fail(root + ".schema", "unsupported schema version (expected 1)");

  SystemConfig c;
  c.dt = optional_number(j, "dt", root);
  if (c.dt && !(*c.dt > 0.0)) fail(root + ".dt", "must be positive");
  if (j.contains("L")) {
    const auto& L = j.at("L");
    if (!L.is_number_unsigned() || L.get<std::size_t>() == 0)
      fail(root + ".L", "expected a positive integer");
    c.L = L.get<std::size_t>();
  }
  if (j.contains("windows")) c.windows = entries_from(j.at("windows"), root + ".windows");
  c.delta = optional_number(j, "delta", root);
  if (c.delta && !(*c.delta > 0.0)) fail(root + ".delta", "must be positive");
  if (j.contains("b_range")) {
    const auto xs = numbers(j.at("b_range"), root + ".b_range");
    if (xs.size() != 2 || !(xs[0] > 0.0) || !(xs[0] <= xs[1]))
      fail(root + ".b_range", "expected [b_L, b_U] with 0 < b_L <= b_U");
    c.b_range = FrequencyRange{xs[0], xs[1]};
  }
  if (j.contains("profiles")) {
    const auto& v = j.at("profiles");
    if (!v.is_array()) fail(root + ".profiles", "expected an array");
    std::vector<ProfileConfig> ps;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = root + ".profiles[" + std::to_string(i) + "]";
      check_keys(v[i], {"C", "p", "shape", "half_gap"}, p);
      ProfileConfig pc;
      pc.C = number_at(v[i], "C", p);
      pc.p = number_at(v[i], "p", p);
      if (!(pc.C >= 0.0)) fail(p + ".C", "must be nonnegative");
      if (v[i].contains("shape")) {
        const auto shape = parse_decay_shape(string_at(v[i], "shape", p));
        if (!shape) fail(p + ".shape", "expected 'centered' or 'gap'");
        pc.shape = *shape;
      }
      pc.half_gap = optional_number(v[i], "half_gap", p);
      ps.push_back(pc);
    }
    c.profiles = std::move(ps);
  }
  if (j.contains("reference")) {
    const std::string p = root + ".reference";
    const auto& r = j.at("reference");
    check_keys(r, {"A", "B"}, p);
    c.reference = ReferenceBounds{number_at(r, "A", p), optional_number(r, "B", p)};
  }
  if (j.contains("reference_windows"))
    c.reference_windows = entries_from(j.at("reference_windows"), root + ".reference_windows");
  if (j.contains("scale_sequence")) {
    const std::string p = root + ".scale_sequence";
    const auto& s = j.at("scale_sequence");
    check_keys(s, {"rule", "values", "a0", "bandlimit", "truncate"}, p);
    ScaleSequenceConfig sc;
    const auto rule = parse_scale_rule(string_at(s, "rule", p));
    if (!rule) fail(p + ".rule", "expected 'example1' or 'example2'");
    sc.sequence.rule = *rule;
    for (double v : numbers(at(s, "values", p), p + ".values")) {
      if (v != std::round(v)) fail(p + ".values", "expected integers");
      sc.sequence.values.push_back(static_cast<int>(v));
    }
    sc.a0 = optional_number(s, "a0", p).value_or(0.0);
    sc.bandlimit = optional_number(s, "bandlimit", p);
    if (s.contains("truncate")) {
      if (!s.at("truncate").is_boolean()) fail(p + ".truncate", "expected a boolean");
      sc.truncate = s.at("truncate").get<bool>();
    }
    c.scale_sequence = std::move(sc);
  }
  if (!c.windows.empty() && c.scale_sequence)
    fail(root, "give either 'windows' or 'scale_sequence', not both");
  if (j.contains("existence")) {
    const std::string p = root + ".existence";
    const auto& e = j.at("existence");
    check_keys(e, {"centers", "A0", "B0", "mu", "side"}, p);
    ExistenceConfig ec;
    ec.centers = numbers(at(e, "centers", p), p + ".centers");
    ec.A0 = number_at(e, "A0", p);
    ec.B0 = optional_number(e, "B0", p);
    ec.mu = optional_number(e, "mu", p);
    if (e.contains("side")) {
      const std::string side = string_at(e, "side", p);
      if (side != "time" && side != "frequency") fail(p + ".side", "expected 'time' or 'frequency'");
      ec.frequency_side = side == "frequency";
    }
    c.existence = std::move(ec);
  }

  // Validate eagerly so a malformed system surfaces as an input error.
  if (c.has_system()) (void)c.system();
  if (c.reference_windows) (void)c.reference_system();
  return c;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

NsgSystem SystemConfig::system() const {
  if (scale_sequence) {
    NsgSystem sys = build_scale_system(scale_sequence->sequence, scale_sequence->a0);
    if (scale_sequence->bandlimit) sys = bandlimit_system(sys, *scale_sequence->bandlimit);
    if (scale_sequence->truncate) sys = truncate_system(sys);
    return sys;
  }
  if (windows.empty()) throw InputError("missing key 'config.windows'");
  const double d = delta.value_or(0.0);
  if (!delta) throw InputError("missing key 'config.delta'");
  if (b_range) return NsgSystem(windows, d, *b_range);
  return NsgSystem(windows, d);
}

std::optional<NsgSystem> SystemConfig::reference_system() const {
  if (!reference_windows) return std::nullopt;
  if (!delta) throw InputError("missing key 'config.delta'");
  if (b_range) return NsgSystem(*reference_windows, *delta, *b_range);
  return NsgSystem(*reference_windows, *delta);
}

std::vector<DecayProfile> SystemConfig::resolved_profiles(const NsgSystem& sys) const {
  if (!profiles) throw InputError("missing key 'config.profiles'");
  if (profiles->size() != sys.size()) {
    std::ostringstream os;
    os << "config.profiles: " << profiles->size() << " entries for " << sys.size() << " windows";
    throw InputError(os.str());
  }
  std::vector<DecayProfile> out;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const auto& p = (*profiles)[k];
    const double half_gap =
        p.shape == DecayShape::gap ? p.half_gap.value_or(0.5 / sys[k].b) : 0.0;
    out.push_back({p.C, p.p, p.shape, sys[k].center, half_gap});
  }
  return out;
}

json to_json(const SystemConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  if (c.dt) j["dt"] = *c.dt;
  if (c.L) j["L"] = *c.L;
  if (!c.windows.empty()) j["windows"] = entries_to_json(c.windows);
  if (c.delta) j["delta"] = *c.delta;
  if (c.b_range) j["b_range"] = {c.b_range->lower, c.b_range->upper};
  if (c.profiles) {
    json ps = json::array();
    for (const auto& p : *c.profiles) {
      json e{{"C", p.C}, {"p", p.p}, {"shape", std::string(to_string(p.shape))}};
      if (p.half_gap) e["half_gap"] = *p.half_gap;
      ps.push_back(std::move(e));
    }
    j["profiles"] = std::move(ps);
  }
  if (c.reference) {
    json r{{"A", c.reference->A}};
    if (c.reference->B) r["B"] = *c.reference->B;
    j["reference"] = std::move(r);
  }
  if (c.reference_windows) j["reference_windows"] = entries_to_json(*c.reference_windows);
  if (c.scale_sequence) {
    const auto& s = *c.scale_sequence;
    json e{{"rule", std::string(to_string(s.sequence.rule))},
           {"values", s.sequence.values},
           {"a0", s.a0}};
    if (s.bandlimit) e["bandlimit"] = *s.bandlimit;
    if (s.truncate) e["truncate"] = true;
    j["scale_sequence"] = std::move(e);
  }
  if (c.existence) {
    const auto& x = *c.existence;
    json e{{"centers", x.centers}, {"A0", x.A0}};
    if (x.B0) e["B0"] = *x.B0;
    if (x.mu) e["mu"] = *x.mu;
    e["side"] = x.frequency_side ? "frequency" : "time";
    j["existence"] = std::move(e);
  }
  return j;
}

json certificate_to_json(const FrameCertificate& c, std::optional<double> wall_seconds) {
  json j;
  j["tool"] = "nsframe";
  j["version"] = kToolVersion;
  j["method"] = std::string(to_string(c.method));
  j["verdict"] = std::string(to_string(c.verdict));
  j["A"] = c.A;
  j["B"] = c.B ? json(*c.B) : json(nullptr);
  json constants = json::object();
  for (const auto& [k, v] : c.constants)
    if (std::isfinite(v)) constants[k] = v;
  j["constants"] = std::move(constants);
  json provenance = json::object();
  for (const auto& [k, v] : c.provenance)
    if (std::isfinite(v)) provenance[k] = v;
  j["provenance"] = std::move(provenance);
  j["sequence"] = c.sequence;
  j["notes"] = c.notes;
  if (wall_seconds) j["timing"] = {{"wall_seconds", *wall_seconds}};
  return j;
}

FrameCertificate certificate_from_json(const json& j) {
  const std::string root = "report";
  check_keys(j,
             {"tool", "version", "method", "verdict", "A", "B", "constants", "provenance",
              "sequence", "notes", "timing"},
             root);
  FrameCertificate c;
  const auto method = parse_cert_method(string_at(j, "method", root));
  if (!method) fail(root + ".method", "unknown certification method");
  c.method = *method;
  const auto verdict = parse_verdict(string_at(j, "verdict", root));
  if (!verdict) fail(root + ".verdict", "expected 'certified' or 'not_certified'");
  c.verdict = *verdict;
  c.A = number_at(j, "A", root);
  c.B = optional_number(j, "B", root);
  for (const char* key : {"constants", "provenance"}) {
    const auto& m = at(j, key, root);
    require_object(m, root + "." + key);
    auto& dst = std::string_view(key) == "constants" ? c.constants : c.provenance;
    for (auto it = m.begin(); it != m.end(); ++it)
      dst[it.key()] = number(it.value(), root + "." + key + "." + it.key());
  }
  if (j.contains("sequence")) c.sequence = numbers(j.at("sequence"), root + ".sequence");
  if (j.contains("notes")) {
    const auto& n = j.at("notes");
    if (!n.is_array()) fail(root + ".notes", "expected an array of strings");
    for (const auto& s : n) {
      if (!s.is_string()) fail(root + ".notes", "expected an array of strings");
      c.notes.push_back(s.get<std::string>());
    }
  }
  return c;
}

void write_coefficients(const std::filesystem::path& path, const CoefficientSet& coefficients) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os.write("NSGC", 4);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(coefficients.rows.size()));
  for (const auto& row : coefficients.rows) {
    put_u32(os, static_cast<std::uint32_t>(row.size()));
    for (const auto& c : row) {
      put_f64(os, c.real());
      put_f64(os, c.imag());
    }
  }
  if (!os) throw InputError("failed writing " + path.string());
}

CoefficientSet read_coefficients(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + p);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "NSGC", 4) != 0)
    fail(p, "not a coefficient file (bad magic)");
  if (get_bytes(is, 4, p) != 1) fail(p, "unsupported coefficient file version");
  const auto K = get_bytes(is, 4, p);
  CoefficientSet out;
  for (std::uint64_t k = 0; k < K; ++k) {
    const auto M = get_bytes(is, 4, p);
    Signal row(M);
    for (auto& c : row) {
      const double re = std::bit_cast<double>(get_bytes(is, 8, p));
      const double im = std::bit_cast<double>(get_bytes(is, 8, p));
      c = {re, im};
    }
    out.rows.push_back(std::move(row));
  }
  if (is.peek() != std::char_traits<char>::eof()) fail(p, "trailing bytes after the last row");
  return out;
}

void write_signal(const std::filesystem::path& path, const std::vector<double>& signal) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  for (double x : signal) put_f64(os, x);
  if (!os) throw InputError("failed writing " + path.string());
}

std::vector<double> read_signal(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + p);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) fail(p, "length is not a multiple of 8 bytes");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(bytes[8 * i + b]);
    out[i] = std::bit_cast<double>(v);
  }
  return out;
}

}  // namespace nsframe
