// qest: bounds, scaling sweeps, Monte-Carlo estimation and property suites
// for single-parameter quantum estimation.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 dimension cap exceeded.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qest/commands.hpp"

namespace {

struct Output {
  std::string path;
  std::string format = "json";
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.path, "Report path (stdout when omitted)");
  cmd->add_option("--format", out.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const qest::Report& report, const Output& out) {
  for (const auto& w : report.document.value("warnings", qest::Json::array())) {
    std::cerr << "warning: " << w.get<std::string>() << '\n';
  }
  qest::emit_report(report, qest::parse_format(out.format), out.path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum single-parameter estimation bounds"};
  app.require_subcommand(1);

  Output out;
  std::string spec_path;

  qest::BoundsConfig bounds;
  auto* b = app.add_subcommand("bounds", "Seminorm, sensitivity bound and precision chain");
  b->add_option("spec", spec_path, "Probe spec file")->required();
  b->add_option("--gamma", bounds.gamma, "Parameter value");
  b->add_option("--time", bounds.t, "Evolution time");
  add_output(b, out);

  qest::ScalingConfig scaling;
  std::string mode = "bound";
  double scaling_gamma = 0.0;
  auto* s = app.add_subcommand("scaling", "Sweep N and fit the scaling exponent");
  s->add_option("spec", spec_path, "Probe spec template")->required();
  s->add_option("--n-min", scaling.n_min, "Smallest N")->required();
  s->add_option("--n-max", scaling.n_max, "Largest N")->required();
  s->add_option("--mode", mode, "bound | qfi | mc")->check(CLI::IsMember({"bound", "qfi", "mc"}));
  auto* sg = s->add_option("--gamma", scaling_gamma, "Fixed parameter (default: operating point)");
  s->add_option("--time", scaling.t, "Evolution time");
  s->add_option("--nu", scaling.nu, "Probes per batch (mc mode)");
  s->add_option("--seed", scaling.seed, "Seed (mc mode)");
  s->add_option("--batches", scaling.batches, "Monte-Carlo batches (mc mode)");
  add_output(s, out);

  qest::EstimateConfig est;
  double est_gamma = 0.0;
  auto* e = app.add_subcommand("estimate", "Monte-Carlo estimation against the bound");
  e->add_option("spec", spec_path, "Probe spec file")->required();
  auto* eg = e->add_option("--gamma", est_gamma, "True parameter (default: operating point)");
  e->add_option("--time", est.t, "Evolution time");
  e->add_option("--nu", est.nu, "Probes per estimate");
  e->add_option("--seed", est.seed, "Seed");
  e->add_option("--batches", est.batches, "Independent estimates averaged into the deviation");
  add_output(e, out);

  qest::VerifyConfig ver;
  auto* v = app.add_subcommand("verify", "Run a randomized property suite");
  v->add_option("--suite", ver.suite, "chain | deferred | seminorm")
      ->check(CLI::IsMember({"chain", "deferred", "seminorm"}));
  v->add_option("--cases", ver.cases, "Number of random cases")->check(CLI::NonNegativeNumber);
  v->add_option("--seed", ver.seed, "Seed");
  add_output(v, out);

  std::string report_path;
  auto* r = app.add_subcommand("replay", "Re-run the experiment recorded in a JSON report");
  r->add_option("report", report_path, "JSON report")->required();
  add_output(r, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 2;
  }

  try {
    if (*b) {
      bounds.spec = qest::SpecInput::from_file(spec_path);
      emit(qest::cmd_bounds(bounds), out);
    } else if (*s) {
      scaling.spec = qest::SpecInput::from_file(spec_path);
      scaling.mode = qest::parse_scaling_mode(mode);
      if (*sg) scaling.gamma = scaling_gamma;
      emit(qest::cmd_scaling(scaling), out);
    } else if (*e) {
      est.spec = qest::SpecInput::from_file(spec_path);
      if (*eg) est.gamma = est_gamma;
      emit(qest::cmd_estimate(est), out);
    } else if (*v) {
      qest::VerifyOutcome o = qest::cmd_verify(ver);
      for (const auto& line : o.result.diagnostics) std::cerr << line << '\n';
      if (out.path.empty()) {
        std::cout << o.result.suite << ": " << o.result.cases << " cases, " << o.result.failures
                  << " failures, max discrepancy " << qest::format_number(o.result.max_discrepancy)
                  << (o.result.pass() ? " PASS" : " FAIL") << '\n';
      } else {
        emit(o.report, out);
      }
      return o.result.pass() ? 0 : 1;
    } else if (*r) {
      qest::Json doc;
      try {
        doc = qest::Json::parse(qest::read_text_file(report_path));
      } catch (const qest::Json::parse_error& ex) {
        throw qest::InvalidArgument("'" + report_path + "' is not valid JSON: " + ex.what());
      }
      emit(qest::replay(doc), out);
    }
  } catch (const qest::DimensionCapError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  } catch (const qest::ParseError& ex) {
    std::cerr << spec_path << ':' << ex.what() << '\n';
    return 2;
  } catch (const qest::Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
