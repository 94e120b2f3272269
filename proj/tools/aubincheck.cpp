// Command-line front end: analyze, membership, probe and derivatives.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "aubin/error.hpp"
#include "aubin/report.hpp"

using namespace aubin;

namespace {

struct Common {
  std::string file;
  bool json = false;
  std::string tol_overrides;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax:
    case ErrorCode::Index:
    case ErrorCode::Exponent:
    case ErrorCode::Input:
    case ErrorCode::DimensionMismatch:
      return 2;
    case ErrorCode::Domain:
    case ErrorCode::MfcqViolated:
    case ErrorCode::InfeasiblePoint:
    case ErrorCode::NotStationary:
    case ErrorCode::UnsupportedConePattern:
      return 3;
    case ErrorCode::ProbeCapability:
      return 4;
  }
  return 2;
}

void emit(const io::ReportDocument& doc, bool json) {
  if (json) {
    std::cout << io::emit_json(doc);
  } else {
    std::cout << io::render_text(doc);
  }
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Loads the file, runs `body` and maps library errors to exit codes while
/// still emitting a report.
template <class Body>
int run(const Common& c, const std::string& command, Body&& body) {
  io::ReportDocument doc;
  doc.command = command;
  try {
    io::ProblemFile pf = io::load_problem_file(c.file);
    if (!c.tol_overrides.empty()) io::apply_tolerance_overrides(pf.tol, c.tol_overrides);
    doc = io::make_document(pf, command);
    body(pf, doc);
    emit(doc, c.json);
    return 0;
  } catch (const Error& e) {
    io::add_error(doc, to_string(e.code()), e.what());
    emit(doc, c.json);
    std::cerr << "aubincheck: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  }
}

conditions::Mode parse_mode(const std::string& m) {
  return m == "strict" ? conditions::Mode::Strict : conditions::Mode::Extended;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("file", c.file, "problem file")->required();
  app->add_flag("--json", c.json, "emit the JSON report instead of text");
  app->add_option("--tol-overrides", c.tol_overrides, "tolerance overrides, e.g. tau_rank=1e-10,tau_col=1e-6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz-like property of stationary point maps of parametric programs"};
  app.require_subcommand(1);

  Common common;
  std::string mode = "extended";

  auto* analyze = app.add_subcommand("analyze", "evaluate the kernel and cone conditions and the verdict");
  add_common(analyze, common);
  analyze->add_option("--mode", mode, "strict or extended")->check(CLI::IsMember({"strict", "extended"}));

  std::vector<double> xprime, wprime;
  auto* membership = app.add_subcommand("membership", "coderivative membership of w' for direction x'");
  add_common(membership, common);
  membership->add_option("--xprime", xprime, "comma-separated x'")->delimiter(',')->required();
  membership->add_option("--wprime", wprime, "comma-separated w'")->delimiter(',')->required();

  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples, levels, grid_points;
  std::optional<double> delta0;
  auto* probe = app.add_subcommand("probe", "sample stationary sets and probe distance ratios");
  add_common(probe, common);
  probe->add_option("--csv", csv, "write every sampled stationary point to this CSV file");
  probe->add_option("--seed", seed, "low-discrepancy sequence seed");
  probe->add_option("--samples", samples, "parameter samples per radius");
  probe->add_option("--levels", levels, "number of radii");
  probe->add_option("--delta0", delta0, "largest parameter radius");
  probe->add_option("--grid-points", grid_points, "grid points per axis (odd)");

  std::optional<double> fd_step;
  auto* derivatives = app.add_subcommand("derivatives", "dump derivative blocks at the reference point");
  add_common(derivatives, common);
  derivatives->add_option("--fd-audit", fd_step, "compare against central differences with this step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (analyze->parsed()) {
    return run(common, "analyze", [&](const io::ProblemFile& pf, io::ReportDocument& doc) {
      io::add_verdict(doc, conditions::verdict(pf.spec, pf.point, pf.tol, parse_mode(mode)));
    });
  }
  if (membership->parsed()) {
    return run(common, "membership", [&](const io::ProblemFile& pf, io::ReportDocument& doc) {
      const conditions::Verdict v = conditions::verdict(pf.spec, pf.point, pf.tol, conditions::Mode::Extended);
      io::add_verdict(doc, v);
      const calculus::DerivativeBundle b = calculus::derivative_bundle(pf.spec, pf.point);
      const Vector xp = to_vector(xprime), wp = to_vector(wprime);
      if (xp.size() != pf.spec.n || wp.size() != pf.spec.d) {
        throw Error(ErrorCode::Input, "--xprime needs " + std::to_string(pf.spec.n) + " entries and --wprime " +
                                          std::to_string(pf.spec.d));
      }
      const double lambda = v.multiplier ? v.multiplier->lambda : 0.0;
      io::add_membership(doc, xp, wp, conditions::coderivative_membership(b, v.tag, lambda, xp, wp, pf.tol));
    });
  }
  if (probe->parsed()) {
    return run(common, "probe", [&](io::ProblemFile pf, io::ReportDocument& doc) {
      if (seed) pf.probe.seed = *seed;
      if (samples) pf.probe.samples = *samples;
      if (levels) pf.probe.levels = *levels;
      if (delta0) pf.probe.delta0 = *delta0;
      if (grid_points) pf.grid.m = *grid_points;
      if (pf.spec.n > 2 || pf.spec.d > 2) {
        throw Error(ErrorCode::ProbeCapability, "the probe supports n <= 2 and d <= 2");
      }
      io::add_verdict(doc, conditions::verdict(pf.spec, pf.point, pf.tol, conditions::Mode::Extended));
      const calculus::DerivativeModel model(pf.spec);
      const oracle::ProbeReport r = oracle::aubin_probe(model, pf.point, pf.probe, pf.grid, pf.tol);
      io::add_probe(doc, r);
      if (!csv.empty()) {
        std::ofstream out(csv);
        if (!out) throw Error(ErrorCode::Input, "cannot write CSV file " + csv);
        oracle::write_csv(out, r.sets, pf.spec.n);
      }
    });
  }
  return run(common, "derivatives", [&](const io::ProblemFile& pf, io::ReportDocument& doc) {
    const calculus::DerivativeBundle b = calculus::derivative_bundle(pf.spec, pf.point);
    std::optional<calculus::AuditReport> audit;
    if (fd_step) audit = calculus::finite_difference_audit(pf.spec, pf.point, *fd_step);
    io::add_derivatives(doc, b, audit);
  });
}
