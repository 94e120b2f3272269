#pragma once

// Machine-readable report document, its JSON form and a plain-text rendering.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aubin/conditions.hpp"
#include "aubin/oracle.hpp"
#include "aubin/problem_file.hpp"

namespace aubin::io {

inline constexpr int kSchemaVersion = 1;

using RealRows = std::vector<std::vector<double>>;

struct InputEcho {
  int n = 0;
  int d = 0;
  std::string f0;
  std::string F;
  std::vector<double> x;
  std::vector<double> w;
  std::map<std::string, double> tolerances;
  bool operator==(const InputEcho&) const = default;
};

struct KernelEntry {
  std::string name;
  int dim = 0;
  bool operator==(const KernelEntry&) const = default;
};

struct ConditionEntry {
  std::string id;
  bool holds = false;
  std::vector<KernelEntry> kernels;
  std::string cone;
  std::vector<std::string> warnings;
  bool operator==(const ConditionEntry&) const = default;
};

struct MembershipEntry {
  std::vector<double> xprime;
  std::vector<double> wprime;
  std::string answer;
  std::optional<std::vector<double>> v;
  std::optional<double> gamma;
  std::string branch;
  std::vector<std::string> notes;
  bool operator==(const MembershipEntry&) const = default;
};

struct WitnessEntry {
  std::vector<double> w_from;
  std::vector<double> w_to;
  std::vector<double> x;
  double distance = 0.0;
  double ratio = 0.0;
  bool operator==(const WitnessEntry&) const = default;
};

struct LevelEntry {
  double delta = 0.0;
  double worst_ratio = 0.0;
  double median_ratio = 0.0;
  int pairs = 0;
  int empty_events = 0;
  std::optional<WitnessEntry> witness;
  bool operator==(const LevelEntry&) const = default;
};

struct ProbeEntry {
  std::string flag;
  std::uint64_t seed = 0;
  double delta0 = 0.0;
  int samples = 0;
  double rho_u = 0.0;
  double growth = 0.0;
  double blowup = 0.0;
  double radial_floor = 0.0;
  double r_x = 0.0;
  int grid_points = 0;
  int sampled_sets = 0;
  std::vector<LevelEntry> levels;
  std::vector<std::string> warnings;
  bool operator==(const ProbeEntry&) const = default;
};

struct AuditEntry {
  std::string block;
  double max_abs_deviation = 0.0;
  bool operator==(const AuditEntry&) const = default;
};

struct DerivativesEntry {
  double Fval = 0.0;
  std::vector<double> gxf0;
  RealRows Hxx;
  RealRows Hwx;
  std::vector<double> gxF;
  std::vector<double> gwF;
  RealRows Fxx;
  RealRows Fwx;
  std::optional<double> audit_step;
  std::vector<AuditEntry> audit;
  std::optional<double> audit_worst;
  bool operator==(const DerivativesEntry&) const = default;
};

struct ErrorEntry {
  std::string code;
  std::string message;
  bool operator==(const ErrorEntry&) const = default;
};

struct ReportDocument {
  int schema_version = kSchemaVersion;
  std::string command;
  InputEcho input;
  std::optional<std::string> case_tag;
  std::optional<bool> borderline_multiplier;
  std::optional<double> lambda;
  std::optional<double> residual;
  std::vector<ConditionEntry> conditions;
  std::optional<std::string> verdict;
  std::optional<std::string> theorem;
  std::optional<std::string> mode;
  std::optional<bool> extended_map;
  std::vector<MembershipEntry> membership;
  std::optional<ProbeEntry> probe;
  std::optional<DerivativesEntry> derivatives;
  std::vector<std::string> warnings;
  std::optional<ErrorEntry> error;
  bool operator==(const ReportDocument&) const = default;
};

ReportDocument make_document(const ProblemFile& pf, std::string command);
void add_verdict(ReportDocument& doc, const conditions::Verdict& v);
void add_membership(ReportDocument& doc, const Vector& xprime, const Vector& wprime,
                    const conditions::MembershipResult& r);
void add_probe(ReportDocument& doc, const oracle::ProbeReport& r);
void add_derivatives(ReportDocument& doc, const calculus::DerivativeBundle& b,
                     const std::optional<calculus::AuditReport>& audit);
void add_error(ReportDocument& doc, const std::string& code, const std::string& message);

nlohmann::json to_json(const ReportDocument& doc);
ReportDocument from_json(const nlohmann::json& j);

/// Stable text: two-space indented JSON with a trailing newline.
std::string emit_json(const ReportDocument& doc);

std::string render_text(const ReportDocument& doc);

/// Notes attached to registered fixtures whose reference analysis disagrees
/// with recomputation; empty for any other problem.
std::vector<std::string> discrepancy_notes(const ProblemFile& pf);

}  // namespace aubin::io
