#include "qest/commands.hpp"

#include <cmath>
#include <numbers>

#include "qest/estimate.hpp"
#include "qest/fisher.hpp"

namespace qest {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json spec_json(const SpecInput& in, const ProbeSpec& spec) {
  Json j;
  j["spec_path"] = in.path;
  j["spec"] = to_string(spec);
  return j;
}

void add_row(Table& t, const std::string& name, Cell value) {
  t.rows.push_back({name, std::move(value)});
}

Table key_value_table() {
  Table t;
  t.header = {"quantity", "value"};
  return t;
}

}  // namespace

SpecInput SpecInput::from_file(const std::string& path) { return {path, read_text_file(path)}; }

ProbeSpec SpecInput::parse() const { return parse_probe_spec(text); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("a line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("a line fit needs two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

std::string to_string(ScalingConfig::Mode mode) {
  switch (mode) {
    case ScalingConfig::Mode::bound: return "bound";
    case ScalingConfig::Mode::qfi: return "qfi";
    case ScalingConfig::Mode::mc: return "mc";
  }
  return "bound";
}

ScalingConfig::Mode parse_scaling_mode(const std::string& name) {
  if (name == "bound") return ScalingConfig::Mode::bound;
  if (name == "qfi") return ScalingConfig::Mode::qfi;
  if (name == "mc" || name == "monte_carlo") return ScalingConfig::Mode::mc;
  throw InvalidArgument("unknown scaling mode '" + name + "' (bound | qfi | mc)");
}

// ---------------------------------------------------------------------------

Report cmd_bounds(const BoundsConfig& config) {
  if (!(config.t > 0.0)) throw InvalidArgument("time must be positive");
  const ProbeSpec spec = config.spec.parse();
  const Probe probe = build_probe(spec);
  const CouplingSummary cs = coupling_summary(probe);
  const BoundChainReport chain =
      bound_chain(probe.initial, probe.h0, probe.aux, config.gamma, config.t);
  const double bound = 1.0 / (config.t * cs.seminorm_h0);
  const bool tighter = cs.seminorm_h0 < cs.seminorm_bound * (1.0 - 1e-9);
  const bool k_ok = chain.seminorm_K <= chain.t_seminorm_h0 * (1.0 + 1e-6) + 1e-9;

  Report r;
  Json& d = r.document;
  d["command"] = "bounds";
  Json cfg = spec_json(config.spec, spec);
  cfg["gamma"] = config.gamma;
  cfg["time"] = config.t;
  d["config"] = cfg;

  Json coupling;
  coupling["n"] = spec.n_systems;
  coupling["d"] = spec.local_dim;
  coupling["k"] = spec.degree;
  coupling["seminorm_h0"] = cs.seminorm_h0;
  coupling["seminorm_unit"] = cs.seminorm_unit;
  coupling["binomial_nk"] = cs.binomial_nk;
  coupling["combinatorial_bound"] = cs.seminorm_bound;
  coupling["exact_strictly_tighter"] = tighter;
  coupling["lambda_max"] = optional_number(cs.lambda_max);
  coupling["lambda_min"] = optional_number(cs.lambda_min);
  Json res;
  res["coupling"] = coupling;
  res["delta_gamma_bound"] = bound;
  res["qcrb_single_shot"] = chain.qfi > 0.0 ? Json(1.0 / std::sqrt(chain.qfi)) : Json(nullptr);
  Json ch;
  ch["pure"] = chain.pure;
  ch["qfi"] = chain.qfi;
  ch["sqrt_qfi"] = chain.sqrt_qfi;
  ch["two_delta_K"] = chain.two_delta_K;
  ch["seminorm_K"] = chain.seminorm_K;
  ch["t_seminorm_h0"] = chain.t_seminorm_h0;
  ch["four_var_K"] = chain.variance_bound;
  ch["sld_truncated_fraction"] = chain.truncated_fraction;
  ch["slacks"] = chain.slacks;
  ch["ordered"] = chain.all_ordered;
  ch["k_bound_holds"] = k_ok;
  res["chain"] = ch;
  d["results"] = res;
  d["warnings"] = Json::array();

  Table t = key_value_table();
  add_row(t, "n", std::int64_t{spec.n_systems});
  add_row(t, "d", std::int64_t{spec.local_dim});
  add_row(t, "k", std::int64_t{spec.degree});
  add_row(t, "seminorm_h0", cs.seminorm_h0);
  add_row(t, "seminorm_unit", cs.seminorm_unit);
  add_row(t, "binomial_nk", cs.binomial_nk);
  add_row(t, "combinatorial_bound", cs.seminorm_bound);
  add_row(t, "exact_strictly_tighter", std::string(tighter ? "true" : "false"));
  add_row(t, "delta_gamma_bound", bound);
  add_row(t, "qfi", chain.qfi);
  add_row(t, "sqrt_qfi", chain.sqrt_qfi);
  add_row(t, "two_delta_K", chain.two_delta_K);
  add_row(t, "seminorm_K", chain.seminorm_K);
  add_row(t, "t_seminorm_h0", chain.t_seminorm_h0);
  add_row(t, "four_var_K", chain.variance_bound);
  add_row(t, "chain_ordered", std::string(chain.all_ordered ? "true" : "false"));
  r.table = std::move(t);
  return r;
}

// ---------------------------------------------------------------------------

ScalingResult run_scaling(const ScalingConfig& config) {
  if (config.n_min < 1 || config.n_max < config.n_min) {
    throw InvalidArgument("need 1 <= n-min <= n-max");
  }
  if (!(config.t > 0.0)) throw InvalidArgument("time must be positive");
  const ProbeSpec base = config.spec.parse();
  const int k = base.degree;

  ScalingResult out;
  std::optional<DimensionCapError> cap_hit;
  std::vector<double> x_binom, x_log, y;
  for (int n = std::max(config.n_min, k); n <= config.n_max; ++n) {
    if (n < config.n_min) continue;
    try {
      const ProbeSpec spec = with_systems(base, n);
      const Probe probe = build_probe(spec);
      ScalingRow row;
      row.n = n;
      row.seminorm_h0 = seminorm(probe.h0_probe);
      row.bound = 1.0 / (config.t * row.seminorm_h0);
      const double gamma = config.gamma.value_or(std::numbers::pi / (2.0 * config.t * row.seminorm_h0));
      row.qfi = bound_chain(probe.initial, probe.h0, probe.aux, gamma, config.t).qfi;
      double dgamma = row.bound;
      if (config.mode == ScalingConfig::Mode::qfi) {
        if (!(row.qfi > 0.0)) throw InvalidArgument("QFI vanishes at N = " + std::to_string(n));
        dgamma = 1.0 / std::sqrt(row.qfi);
      } else if (config.mode == ScalingConfig::Mode::mc) {
        EstimationConfig ec;
        ec.nu = config.nu;
        ec.gamma_true = gamma;
        ec.t = config.t;
        ec.seed = config.seed;
        ec.batches = config.batches;
        EstimationReport rep = run_monte_carlo(spec, ec);
        for (const auto& w : rep.warnings) out.warnings.push_back("N=" + std::to_string(n) + ": " + w);
        row.delta_mc = rep.delta_gamma;
        dgamma = rep.delta_gamma;
      }
      out.rows.push_back(row);
      x_binom.push_back(std::log(binomial(n, k)));
      x_log.push_back(std::log(static_cast<double>(n)));
      y.push_back(-std::log(dgamma));
    } catch (const DimensionCapError& e) {
      out.warnings.push_back("N=" + std::to_string(n) + " skipped: " + e.what());
      if (!cap_hit) cap_hit = e;
    }
  }
  if (out.rows.size() < 2) {
    if (cap_hit) throw *cap_hit;
    throw InvalidArgument("scaling needs at least two N values with N >= k");
  }
  const LineFit fb = fit_line(x_binom, y);
  const LineFit fn = fit_line(x_log, y);
  out.exponent = k * fb.slope;
  out.exponent_residual = fb.rms_residual;
  out.naive_exponent = fn.slope;
  out.naive_residual = fn.rms_residual;
  return out;
}

Report cmd_scaling(const ScalingConfig& config) {
  const ProbeSpec spec = config.spec.parse();
  const ScalingResult s = run_scaling(config);

  Report r;
  Json& d = r.document;
  d["command"] = "scaling";
  Json cfg = spec_json(config.spec, spec);
  cfg["n_min"] = config.n_min;
  cfg["n_max"] = config.n_max;
  cfg["mode"] = to_string(config.mode);
  cfg["time"] = config.t;
  cfg["gamma"] = optional_number(config.gamma);
  cfg["nu"] = config.nu;
  cfg["seed"] = config.seed;
  cfg["batches"] = config.batches;
  d["config"] = cfg;

  Json rows = Json::array();
  r.table.header = {"N", "seminorm_h0", "qfi", "bound", "delta_mc", "exponent_fit"};
  for (const ScalingRow& row : s.rows) {
    Json j;
    j["N"] = row.n;
    j["seminorm_h0"] = row.seminorm_h0;
    j["qfi"] = row.qfi;
    j["bound"] = row.bound;
    j["delta_mc"] = optional_number(row.delta_mc);
    rows.push_back(j);
    Cell mc = row.delta_mc ? Cell(*row.delta_mc) : Cell(std::monostate{});
    r.table.rows.push_back(
        {std::int64_t{row.n}, row.seminorm_h0, row.qfi, row.bound, mc, s.exponent});
  }
  Json fit;
  fit["regressor"] = "log C(N,k)";
  fit["exponent"] = s.exponent;
  fit["residual"] = s.exponent_residual;
  fit["naive_exponent"] = s.naive_exponent;
  fit["naive_residual"] = s.naive_residual;
  Json res;
  res["rows"] = rows;
  res["fit"] = fit;
  d["results"] = res;
  d["warnings"] = s.warnings;
  return r;
}

// ---------------------------------------------------------------------------

Report cmd_estimate(const EstimateConfig& config) {
  const ProbeSpec spec = config.spec.parse();
  EstimationConfig ec;
  ec.nu = config.nu;
  ec.t = config.t;
  ec.seed = config.seed;
  ec.batches = config.batches;
  ec.gamma_true = config.gamma ? *config.gamma : operating_point(spec, config.t);
  const EstimationReport rep = run_monte_carlo(spec, ec);

  Report r;
  Json& d = r.document;
  d["command"] = "estimate";
  Json cfg = spec_json(config.spec, spec);
  cfg["gamma"] = optional_number(config.gamma);
  cfg["time"] = config.t;
  cfg["nu"] = config.nu;
  cfg["seed"] = config.seed;
  cfg["batches"] = config.batches;
  d["config"] = cfg;

  Json res;
  res["protocol"] = rep.protocol;
  res["gamma_true"] = rep.config.gamma_true;
  res["window"] = {rep.config.gamma_min, rep.config.gamma_max};
  res["grid_points"] = rep.config.grid_points;
  res["n"] = rep.n_systems;
  res["k"] = rep.degree;
  res["seminorm_h0"] = rep.seminorm_h0;
  res["omega"] = rep.omega;
  res["trials_per_batch"] = rep.trials_per_batch;
  res["mean_estimate"] = rep.mean_estimate;
  res["fd_step"] = rep.fd_step;
  res["mean_estimate_minus"] = rep.mean_estimate_minus;
  res["mean_estimate_plus"] = rep.mean_estimate_plus;
  res["slope"] = rep.slope;
  res["delta_gamma"] = rep.delta_gamma;
  res["bound"] = rep.bound;
  res["ratio"] = rep.ratio;
  res["batch_estimates"] = rep.estimates;
  d["results"] = res;
  d["warnings"] = rep.warnings;

  Table t = key_value_table();
  add_row(t, "protocol", rep.protocol);
  add_row(t, "n", std::int64_t{rep.n_systems});
  add_row(t, "k", std::int64_t{rep.degree});
  add_row(t, "gamma_true", rep.config.gamma_true);
  add_row(t, "time", config.t);
  add_row(t, "nu", static_cast<std::int64_t>(config.nu));
  add_row(t, "seed", static_cast<std::int64_t>(config.seed));
  add_row(t, "batches", std::int64_t{config.batches});
  add_row(t, "gamma_min", rep.config.gamma_min);
  add_row(t, "gamma_max", rep.config.gamma_max);
  add_row(t, "seminorm_h0", rep.seminorm_h0);
  add_row(t, "mean_estimate", rep.mean_estimate);
  add_row(t, "slope", rep.slope);
  add_row(t, "delta_gamma", rep.delta_gamma);
  add_row(t, "bound", rep.bound);
  add_row(t, "ratio", rep.ratio);
  r.table = std::move(t);
  return r;
}

// ---------------------------------------------------------------------------

VerifyOutcome cmd_verify(const VerifyConfig& config) {
  SuiteResult s = run_suite(config.suite, config.cases, config.seed);
  Report r;
  Json& d = r.document;
  d["command"] = "verify";
  d["config"] = {{"suite", config.suite}, {"cases", config.cases}, {"seed", config.seed}};
  Json res;
  res["cases"] = s.cases;
  res["failures"] = s.failures;
  res["max_discrepancy"] = s.max_discrepancy;
  res["pass"] = s.pass();
  res["diagnostics"] = s.diagnostics;
  d["results"] = res;
  d["warnings"] = Json::array();
  r.table.header = {"suite", "cases", "failures", "max_discrepancy", "pass"};
  r.table.rows.push_back({s.suite, std::int64_t{s.cases}, std::int64_t{s.failures},
                          s.max_discrepancy, std::string(s.pass() ? "true" : "false")});
  return {std::move(s), std::move(r)};
}

Report replay(const Json& doc) {
  if (!doc.is_object() || !doc.contains("command") || !doc.contains("config")) {
    throw InvalidArgument("not a qest report: missing command or config");
  }
  const std::string cmd = doc.at("command").get<std::string>();
  const Json& c = doc.at("config");
  try {
    if (cmd == "verify") {
      return cmd_verify({c.at("suite").get<std::string>(), c.at("cases").get<int>(),
                         c.at("seed").get<std::uint64_t>()})
          .report;
    }
    SpecInput spec{c.at("spec_path").get<std::string>(), c.at("spec").get<std::string>()};
    if (cmd == "bounds") {
      return cmd_bounds({spec, c.at("gamma").get<double>(), c.at("time").get<double>()});
    }
    if (cmd == "scaling") {
      ScalingConfig s;
      s.spec = spec;
      s.n_min = c.at("n_min").get<int>();
      s.n_max = c.at("n_max").get<int>();
      s.mode = parse_scaling_mode(c.at("mode").get<std::string>());
      s.t = c.at("time").get<double>();
      s.gamma = read_optional(c, "gamma");
      s.nu = c.at("nu").get<std::uint64_t>();
      s.seed = c.at("seed").get<std::uint64_t>();
      s.batches = c.at("batches").get<int>();
      return cmd_scaling(s);
    }
    if (cmd == "estimate") {
      EstimateConfig e;
      e.spec = spec;
      e.gamma = read_optional(c, "gamma");
      e.t = c.at("time").get<double>();
      e.nu = c.at("nu").get<std::uint64_t>();
      e.seed = c.at("seed").get<std::uint64_t>();
      e.batches = c.at("batches").get<int>();
      return cmd_estimate(e);
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed report config: ") + e.what());
  }
  throw InvalidArgument("unknown command '" + cmd + "' in report");
}

}  // namespace qest
