#pragma once

// The experiments behind each CLI subcommand. Every command returns a Report
// whose JSON form embeds its full configuration (including the canonical spec
// text and seed), so `replay` can regenerate it byte for byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qest/probespec.hpp"
#include "qest/report.hpp"
#include "qest/verify.hpp"

namespace qest {

/// Spec source: the path it came from and its text.
struct SpecInput {
  std::string path;
  std::string text;

  static SpecInput from_file(const std::string& path);
  ProbeSpec parse() const;
};

struct BoundsConfig {
  SpecInput spec;
  double gamma = 1.0;
  double t = 1.0;
};

struct ScalingConfig {
  enum class Mode { bound, qfi, mc };
  SpecInput spec;
  int n_min = 1;
  int n_max = 8;
  Mode mode = Mode::bound;
  double t = 1.0;
  /// Fixed gamma for every row; the operating point pi/(2 t ||h0||) when empty.
  std::optional<double> gamma;
  std::uint64_t nu = 10000;
  std::uint64_t seed = 0;
  int batches = 1000;
};

struct EstimateConfig {
  SpecInput spec;
  std::optional<double> gamma;  // operating point when empty
  double t = 1.0;
  std::uint64_t nu = 10000;
  std::uint64_t seed = 0;
  int batches = 1000;
};

struct VerifyConfig {
  std::string suite = "chain";
  int cases = 100;
  std::uint64_t seed = 0;
};

/// Least-squares line y = a + b x with RMS residual.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingRow {
  int n = 0;
  double seminorm_h0 = 0.0;
  double qfi = 0.0;
  double bound = 0.0;
  std::optional<double> delta_mc;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  /// k * slope of log(1/dgamma) against log C(N, k).
  double exponent = 0.0;
  double exponent_residual = 0.0;
  /// Slope of log(1/dgamma) against log N.
  double naive_exponent = 0.0;
  double naive_residual = 0.0;
  std::vector<std::string> warnings;
};

std::string to_string(ScalingConfig::Mode mode);
ScalingConfig::Mode parse_scaling_mode(const std::string& name);

ScalingResult run_scaling(const ScalingConfig& config);

Report cmd_bounds(const BoundsConfig& config);
Report cmd_scaling(const ScalingConfig& config);
Report cmd_estimate(const EstimateConfig& config);

struct VerifyOutcome {
  SuiteResult result;
  Report report;
};

VerifyOutcome cmd_verify(const VerifyConfig& config);

/// Re-runs the command recorded in a report's JSON document.
Report replay(const Json& document);

}  // namespace qest
