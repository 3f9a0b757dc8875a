#include "iquad/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "iquad/field_io.hpp"

namespace iquad {

namespace {

using Member = std::variant<int RunConfig::*, double RunConfig::*, std::string RunConfig::*, std::uint64_t RunConfig::*>;

const std::vector<std::pair<std::string, Member>>& registry() {
  static const std::vector<std::pair<std::string, Member>> r = {
      {"command", &RunConfig::command},
      {"n", &RunConfig::n},
      {"pitch", &RunConfig::pitch},
      {"pad", &RunConfig::pad},
      {"diameter", &RunConfig::diameter},
      {"delta", &RunConfig::delta},
      {"lambda", &RunConfig::lambda},
      {"axis_policy", &RunConfig::axis_policy},
      {"modulation", &RunConfig::modulation},
      {"modulation_radius", &RunConfig::modulation_radius},
      {"phase", &RunConfig::phase},
      {"zernikes", &RunConfig::zernikes},
      {"r0", &RunConfig::r0},
      {"L0", &RunConfig::L0},
      {"phase_file", &RunConfig::phase_file},
      {"phase_rms", &RunConfig::phase_rms},
      {"method", &RunConfig::method},
      {"data_model", &RunConfig::data_model},
      {"forward", &RunConfig::forward},
      {"domain", &RunConfig::domain},
      {"tau", &RunConfig::tau},
      {"max_iters", &RunConfig::max_iters},
      {"residual_tol", &RunConfig::residual_tol},
      {"s", &RunConfig::s},
      {"modal_order", &RunConfig::modal_order},
      {"alpha", &RunConfig::alpha},
      {"scan_max_order", &RunConfig::scan_max_order},
      {"scan_amplitude", &RunConfig::scan_amplitude},
      {"verify_tier", &RunConfig::verify_tier},
      {"mutation", &RunConfig::mutation},
      {"out", &RunConfig::out},
      {"seed", &RunConfig::seed},
  };
  return r;
}

const Member& find(const std::string& key) {
  for (const auto& [k, m] : registry())
    if (k == key) return m;
  throw ConfigError("unknown config key: " + key);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("bad number for " + key + ": '" + v + "'");
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return i;
}

template <class... T>
bool one_of(const std::string& v, T... opts) {
  return ((v == opts) || ...);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, m] : registry()) keys.push_back(k);
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Member& m = find(key);
  std::visit(
      [&](auto ptr) {
        using T = std::remove_reference_t<decltype(cfg.*ptr)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (value != trim(value) || value.find_first_of("#\n") != std::string::npos)
            throw ConfigError("value for " + key + " may not contain '#', newlines or surrounding blanks");
          cfg.*ptr = value;
        } else if constexpr (std::is_same_v<T, double>) {
          cfg.*ptr = parse_double(key, value);
        } else if constexpr (std::is_same_v<T, int>) {
          const long long i = parse_int(key, value);
          if (i < -2147483647LL || i > 2147483647LL) throw ConfigError("integer out of range for " + key);
          cfg.*ptr = static_cast<int>(i);
        } else {
          if (!value.empty() && value[0] == '-') throw ConfigError("seed must be nonnegative");
          errno = 0;
          char* end = nullptr;
          const unsigned long long u = std::strtoull(value.c_str(), &end, 10);
          if (value.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("bad seed: '" + value + "'");
          cfg.*ptr = u;
        }
      },
      m);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const Member& m = find(key);
  return std::visit(
      [&](auto ptr) -> std::string {
        using T = std::remove_cvref_t<decltype(cfg.*ptr)>;
        if constexpr (std::is_same_v<T, std::string>) return cfg.*ptr;
        else if constexpr (std::is_same_v<T, double>) return format_double(cfg.*ptr);
        else return std::to_string(cfg.*ptr);
      },
      m);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set_config_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& key : config_keys()) out += key + "=" + get_config_value(cfg, key) + "\n";
  return out;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!one_of(c.command, "simulate", "verify", "reconstruct", "compare", "scan")) fail("unknown command " + c.command);
  if (c.n < 8 || c.n % 2) fail("n must be even and >= 8");
  if (!(c.pitch > 0.0)) fail("pitch must be positive");
  if (c.pad < 1) fail("pad must be >= 1");
  if (c.diameter < 0 || c.diameter * c.pad > c.n) fail("diameter must satisfy 0 <= diameter * pad <= n");
  if (!(std::abs(c.delta) <= 0.5)) fail("delta must lie in [-0.5, 0.5]");
  if (!(c.lambda > 0.0)) fail("lambda must be positive");
  if (!one_of(c.axis_policy, "mean", "literal")) fail("axis_policy must be mean or literal");
  if (!one_of(c.modulation, "none", "delta", "tent", "disk", "ring")) fail("unknown modulation " + c.modulation);
  if (!(c.modulation_radius >= 0.0)) fail("modulation_radius must be >= 0");
  if (!one_of(c.phase, "zernike", "screen", "file")) fail("phase must be zernike, screen or file");
  if (c.phase == "file" && c.phase_file.empty()) fail("phase=file needs phase_file");
  if (!(c.r0 > 0.0) || !(c.L0 > 0.0)) fail("r0 and L0 must be positive");
  if (!(c.phase_rms >= 0.0)) fail("phase_rms must be >= 0");
  if (!one_of(c.method, "landweber-linear", "landweber-nonlinear", "cg", "modal")) fail("unknown method " + c.method);
  if (!one_of(c.data_model, "linear", "nonlinear")) fail("data_model must be linear or nonlinear");
  if (!one_of(c.forward, "double", "meta")) fail("forward must be double or meta");
  if (!one_of(c.domain, "hs", "l2")) fail("domain must be hs or l2");
  if (!(c.tau >= 0.0)) fail("tau must be >= 0");
  if (c.max_iters < 0) fail("max_iters must be >= 0");
  if (!(c.residual_tol >= 0.0)) fail("residual_tol must be >= 0");
  if (!(c.s > 1.0 && c.s < 2.0)) fail("s must lie in (1, 2)");
  if (c.modal_order < 1) fail("modal_order must be >= 1");
  if (c.scan_max_order < 1) fail("scan_max_order must be >= 1");
  if (!(c.scan_amplitude > 0.0)) fail("scan_amplitude must be positive");
  if (!one_of(c.verify_tier, "full", "oracle16")) fail("verify_tier must be full or oracle16");
  if (!one_of(c.mutation, "none", "hilbert_sign")) fail("mutation must be none or hilbert_sign");
  if (c.out.empty()) fail("out must be set");
}

}  // namespace iquad
