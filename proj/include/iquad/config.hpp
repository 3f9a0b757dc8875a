#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iquad {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value run configuration. Keys match the field names.
struct RunConfig {
  std::string command = "simulate";

  int n = 64;
  double pitch = 0.25;
  int pad = 2;
  int diameter = 0;  // 0: n / pad

  double delta = 0.25;  // delta / lambda
  double lambda = 500e-9;
  std::string axis_policy = "mean";
  std::string modulation = "none";
  double modulation_radius = 0.0;  // lambda / D

  std::string phase = "zernike";  // zernike | screen | file
  std::string zernikes = "2:-2:0.1,3:1:0.05";  // n:m:rms
  double r0 = 0.5;
  double L0 = 25.0;
  std::string phase_file;
  double phase_rms = 0.0;  // > 0 rescales the input phase to this pupil RMS

  std::string method = "landweber-linear";
  std::string data_model = "linear";  // linear | nonlinear
  std::string forward = "double";     // double | meta
  std::string domain = "hs";          // hs | l2
  double tau = 0.0;                   // 0: automatic
  int max_iters = 500;
  double residual_tol = 1e-6;
  double s = 11.0 / 6.0;
  int modal_order = 4;
  double alpha = -1.0;  // < 0: automatic

  int scan_max_order = 6;
  double scan_amplitude = 1e-3;

  std::string verify_tier = "full";  // full | oracle16
  std::string mutation = "none";     // none | hilbert_sign

  std::string out = "out";
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

std::vector<std::string> config_keys();
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);
RunConfig load_config(const std::string& path);
// "key=value"
void apply_override(RunConfig& cfg, const std::string& assignment);
void validate(const RunConfig& cfg);

}  // namespace iquad
