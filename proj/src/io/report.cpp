#include "aubin/report.hpp"

#include <cstdio>
#include <sstream>

#include "aubin/error.hpp"

namespace aubin::io {

using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

RealRows to_rows(const Matrix& m) {
  RealRows rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) {
    v = j.at(key).get<T>();
  } else {
    v.reset();
  }
}

template <class T>
void get_or(const json& j, const char* key, T& v) {
  if (j.contains(key)) j.at(key).get_to(v);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string rows(const RealRows& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < m[i].size(); ++j) s += (j ? " " : "") + num(m[i][j]);
  }
  return s + "]";
}

}  // namespace

void to_json(json& j, const InputEcho& e) {
  j = json{{"n", e.n}, {"d", e.d}, {"f0", e.f0}, {"F", e.F}, {"x", e.x}, {"w", e.w}, {"tolerances", e.tolerances}};
}
void from_json(const json& j, InputEcho& e) {
  j.at("n").get_to(e.n);
  j.at("d").get_to(e.d);
  j.at("f0").get_to(e.f0);
  j.at("F").get_to(e.F);
  j.at("x").get_to(e.x);
  j.at("w").get_to(e.w);
  j.at("tolerances").get_to(e.tolerances);
}

void to_json(json& j, const KernelEntry& e) { j = json{{"name", e.name}, {"dim", e.dim}}; }
void from_json(const json& j, KernelEntry& e) {
  j.at("name").get_to(e.name);
  j.at("dim").get_to(e.dim);
}

void to_json(json& j, const ConditionEntry& e) {
  j = json{{"id", e.id}, {"holds", e.holds},
           {"evidence", {{"kernels", e.kernels}, {"cone", e.cone}, {"warnings", e.warnings}}}};
}
void from_json(const json& j, ConditionEntry& e) {
  j.at("id").get_to(e.id);
  j.at("holds").get_to(e.holds);
  const json& ev = j.at("evidence");
  ev.at("kernels").get_to(e.kernels);
  ev.at("cone").get_to(e.cone);
  ev.at("warnings").get_to(e.warnings);
}

void to_json(json& j, const MembershipEntry& e) {
  j = json{{"xprime", e.xprime}, {"wprime", e.wprime}, {"answer", e.answer}, {"branch", e.branch}, {"notes", e.notes}};
  if (e.v || e.gamma) {
    json w = json::object();
    put(w, "v", e.v);
    put(w, "gamma", e.gamma);
    j["witness"] = w;
  }
}
void from_json(const json& j, MembershipEntry& e) {
  j.at("xprime").get_to(e.xprime);
  j.at("wprime").get_to(e.wprime);
  j.at("answer").get_to(e.answer);
  j.at("branch").get_to(e.branch);
  j.at("notes").get_to(e.notes);
  e.v.reset();
  e.gamma.reset();
  if (j.contains("witness")) {
    get(j.at("witness"), "v", e.v);
    get(j.at("witness"), "gamma", e.gamma);
  }
}

void to_json(json& j, const WitnessEntry& e) {
  j = json{{"w", e.w_from}, {"w_prime", e.w_to}, {"x_prime", e.x}, {"distance", e.distance}, {"ratio", e.ratio}};
}
void from_json(const json& j, WitnessEntry& e) {
  j.at("w").get_to(e.w_from);
  j.at("w_prime").get_to(e.w_to);
  j.at("x_prime").get_to(e.x);
  j.at("distance").get_to(e.distance);
  j.at("ratio").get_to(e.ratio);
}

void to_json(json& j, const LevelEntry& e) {
  j = json{{"delta", e.delta}, {"worst_ratio", e.worst_ratio}, {"median_ratio", e.median_ratio},
           {"pairs", e.pairs}, {"empty_events", e.empty_events}};
  put(j, "witness", e.witness);
}
void from_json(const json& j, LevelEntry& e) {
  j.at("delta").get_to(e.delta);
  j.at("worst_ratio").get_to(e.worst_ratio);
  j.at("median_ratio").get_to(e.median_ratio);
  j.at("pairs").get_to(e.pairs);
  j.at("empty_events").get_to(e.empty_events);
  get(j, "witness", e.witness);
}

void to_json(json& j, const ProbeEntry& e) {
  j = json{{"flag", e.flag},
           {"seed", e.seed},
           {"delta0", e.delta0},
           {"samples", e.samples},
           {"rho_u", e.rho_u},
           {"growth", e.growth},
           {"blowup", e.blowup},
           {"radial_floor", e.radial_floor},
           {"r_x", e.r_x},
           {"grid_points", e.grid_points},
           {"sampled_sets", e.sampled_sets},
           {"levels", e.levels},
           {"warnings", e.warnings}};
}
void from_json(const json& j, ProbeEntry& e) {
  j.at("flag").get_to(e.flag);
  j.at("seed").get_to(e.seed);
  j.at("delta0").get_to(e.delta0);
  j.at("samples").get_to(e.samples);
  j.at("rho_u").get_to(e.rho_u);
  j.at("growth").get_to(e.growth);
  j.at("blowup").get_to(e.blowup);
  j.at("radial_floor").get_to(e.radial_floor);
  j.at("r_x").get_to(e.r_x);
  j.at("grid_points").get_to(e.grid_points);
  j.at("sampled_sets").get_to(e.sampled_sets);
  j.at("levels").get_to(e.levels);
  j.at("warnings").get_to(e.warnings);
}

void to_json(json& j, const AuditEntry& e) { j = json{{"block", e.block}, {"max_abs_deviation", e.max_abs_deviation}}; }
void from_json(const json& j, AuditEntry& e) {
  j.at("block").get_to(e.block);
  j.at("max_abs_deviation").get_to(e.max_abs_deviation);
}

void to_json(json& j, const DerivativesEntry& e) {
  j = json{{"Fval", e.Fval}, {"gxf0", e.gxf0}, {"Hxx", e.Hxx}, {"Hwx", e.Hwx}, {"gxF", e.gxF},
           {"gwF", e.gwF}, {"Fxx", e.Fxx}, {"Fwx", e.Fwx}};
  if (e.audit_step) {
    j["fd_audit"] = json{{"step", *e.audit_step}, {"blocks", e.audit}, {"worst", e.audit_worst.value_or(0.0)}};
  }
}
void from_json(const json& j, DerivativesEntry& e) {
  j.at("Fval").get_to(e.Fval);
  j.at("gxf0").get_to(e.gxf0);
  j.at("Hxx").get_to(e.Hxx);
  j.at("Hwx").get_to(e.Hwx);
  j.at("gxF").get_to(e.gxF);
  j.at("gwF").get_to(e.gwF);
  j.at("Fxx").get_to(e.Fxx);
  j.at("Fwx").get_to(e.Fwx);
  e.audit.clear();
  e.audit_step.reset();
  e.audit_worst.reset();
  if (j.contains("fd_audit")) {
    const json& a = j.at("fd_audit");
    e.audit_step = a.at("step").get<double>();
    a.at("blocks").get_to(e.audit);
    e.audit_worst = a.at("worst").get<double>();
  }
}

void to_json(json& j, const ErrorEntry& e) { j = json{{"code", e.code}, {"message", e.message}}; }
void from_json(const json& j, ErrorEntry& e) {
  j.at("code").get_to(e.code);
  j.at("message").get_to(e.message);
}

ReportDocument make_document(const ProblemFile& pf, std::string command) {
  ReportDocument doc;
  doc.command = std::move(command);
  doc.input.n = pf.spec.n;
  doc.input.d = pf.spec.d;
  doc.input.f0 = pf.f0_source;
  doc.input.F = pf.F_source;
  doc.input.x = to_std(pf.point.x);
  doc.input.w = to_std(pf.point.w);
  doc.input.tolerances = {{"tau_act", pf.tol.act},
                          {"tau_zero", pf.tol.zero},
                          {"tau_stat", pf.tol.stat},
                          {"tau_rank", pf.tol.rank},
                          {"tau_col", pf.tol.col}};
  for (std::string& note : discrepancy_notes(pf)) doc.warnings.push_back(std::move(note));
  return doc;
}

void add_verdict(ReportDocument& doc, const conditions::Verdict& v) {
  doc.case_tag = calculus::to_string(v.tag);
  doc.borderline_multiplier = v.tag.borderline;
  if (v.multiplier) {
    doc.lambda = v.multiplier->lambda;
    doc.residual = v.multiplier->residual;
  }
  for (const conditions::ConditionReport& c : v.conditions) {
    ConditionEntry e{c.id, c.holds, {}, c.evidence.cone, c.evidence.warnings};
    for (const auto& k : c.evidence.kernels) e.kernels.push_back({k.name, k.dim});
    doc.conditions.push_back(std::move(e));
  }
  doc.verdict = conditions::to_string(v.lipschitz_like);
  doc.theorem = v.theorem;
  doc.mode = conditions::to_string(v.mode);
  doc.extended_map = v.extended_map;
  for (const std::string& w : v.warnings) doc.warnings.push_back(w);
}

void add_membership(ReportDocument& doc, const Vector& xprime, const Vector& wprime,
                    const conditions::MembershipResult& r) {
  MembershipEntry e;
  e.xprime = to_std(xprime);
  e.wprime = to_std(wprime);
  e.answer = conditions::to_string(r.answer);
  if (r.v) e.v = to_std(*r.v);
  e.gamma = r.gamma;
  e.branch = r.branch;
  e.notes = r.notes;
  doc.membership.push_back(std::move(e));
}

void add_probe(ReportDocument& doc, const oracle::ProbeReport& r) {
  ProbeEntry e;
  e.flag = oracle::to_string(r.flag);
  e.seed = r.config.seed;
  e.delta0 = r.config.delta0;
  e.samples = r.config.samples;
  e.rho_u = r.rho_u;
  e.growth = r.config.growth;
  e.blowup = r.config.blowup;
  e.radial_floor = r.config.radial_floor;
  e.r_x = r.grid.r_x;
  e.grid_points = r.grid.points_per_axis(static_cast<int>(doc.input.n));
  e.sampled_sets = static_cast<int>(r.sets.size());
  for (const oracle::LevelReport& l : r.levels) {
    LevelEntry le{l.delta, l.worst_ratio, l.median_ratio, l.pairs, l.empty_events, std::nullopt};
    if (l.witness) {
      le.witness = WitnessEntry{to_std(l.witness->w_from), to_std(l.witness->w_to), to_std(l.witness->x),
                                l.witness->distance, l.witness->ratio};
    }
    e.levels.push_back(std::move(le));
  }
  e.warnings = r.warnings;
  doc.probe = std::move(e);
}

void add_derivatives(ReportDocument& doc, const calculus::DerivativeBundle& b,
                     const std::optional<calculus::AuditReport>& audit) {
  DerivativesEntry e;
  e.Fval = b.Fval;
  e.gxf0 = to_std(b.gxf0);
  e.Hxx = to_rows(b.Hxx);
  e.Hwx = to_rows(b.Hwx);
  e.gxF = to_std(b.gxF);
  e.gwF = to_std(b.gwF);
  e.Fxx = to_rows(b.Fxx);
  e.Fwx = to_rows(b.Fwx);
  if (audit) {
    e.audit_step = audit->step;
    for (const auto& blk : audit->blocks) e.audit.push_back({blk.block, blk.max_abs_deviation});
    e.audit_worst = audit->worst;
  }
  doc.derivatives = std::move(e);
}

void add_error(ReportDocument& doc, const std::string& code, const std::string& message) {
  doc.error = ErrorEntry{code, message};
}

json to_json(const ReportDocument& doc) {
  json j{{"schema_version", doc.schema_version},
         {"command", doc.command},
         {"input", doc.input},
         {"conditions", doc.conditions},
         {"membership", doc.membership},
         {"warnings", doc.warnings}};
  put(j, "case", doc.case_tag);
  put(j, "borderline_multiplier", doc.borderline_multiplier);
  put(j, "lambda", doc.lambda);
  put(j, "residual", doc.residual);
  put(j, "verdict", doc.verdict);
  put(j, "theorem", doc.theorem);
  put(j, "mode", doc.mode);
  put(j, "extended_map", doc.extended_map);
  put(j, "probe", doc.probe);
  put(j, "derivatives", doc.derivatives);
  put(j, "error", doc.error);
  return j;
}

ReportDocument from_json(const json& j) {
  ReportDocument doc;
  j.at("schema_version").get_to(doc.schema_version);
  if (doc.schema_version != kSchemaVersion) {
    throw Error(ErrorCode::Input, "unsupported report schema_version " + std::to_string(doc.schema_version));
  }
  j.at("command").get_to(doc.command);
  j.at("input").get_to(doc.input);
  get_or(j, "conditions", doc.conditions);
  get_or(j, "membership", doc.membership);
  get_or(j, "warnings", doc.warnings);
  get(j, "case", doc.case_tag);
  get(j, "borderline_multiplier", doc.borderline_multiplier);
  get(j, "lambda", doc.lambda);
  get(j, "residual", doc.residual);
  get(j, "verdict", doc.verdict);
  get(j, "theorem", doc.theorem);
  get(j, "mode", doc.mode);
  get(j, "extended_map", doc.extended_map);
  get(j, "probe", doc.probe);
  get(j, "derivatives", doc.derivatives);
  get(j, "error", doc.error);
  return doc;
}

std::string emit_json(const ReportDocument& doc) { return to_json(doc).dump(2) + "\n"; }

std::string render_text(const ReportDocument& doc) {
  std::ostringstream out;
  out << "command: " << doc.command << "\n";
  out << "problem: n = " << doc.input.n << ", d = " << doc.input.d << "\n";
  out << "  f0 = " << doc.input.f0 << "\n  F  = " << doc.input.F << "\n";
  out << "  x = " << list(doc.input.x) << ", w = " << list(doc.input.w) << "\n";
  if (doc.error) out << "error: " << doc.error->code << ": " << doc.error->message << "\n";
  if (doc.case_tag) {
    out << "case: " << *doc.case_tag;
    if (doc.borderline_multiplier.value_or(false)) out << " (borderline multiplier)";
    out << "\n";
  }
  if (doc.lambda) out << "lambda: " << num(*doc.lambda) << " (residual " << num(doc.residual.value_or(0.0)) << ")\n";
  if (!doc.conditions.empty()) out << "conditions:\n";
  for (const ConditionEntry& c : doc.conditions) {
    out << "  " << c.id << ": " << (c.holds ? "holds" : "fails");
    for (const KernelEntry& k : c.kernels) out << "  dim(" << k.name << ") = " << k.dim;
    if (!c.cone.empty()) out << "  cone: " << c.cone;
    out << "\n";
  }
  if (doc.verdict) {
    out << "verdict: " << *doc.verdict;
    if (doc.theorem && !doc.theorem->empty()) out << " by " << *doc.theorem;
    out << " (mode " << doc.mode.value_or("?") << ")\n";
  }
  if (doc.extended_map) out << "extended map Lipschitz-like: " << (*doc.extended_map ? "yes" : "no") << "\n";
  for (const MembershipEntry& m : doc.membership) {
    out << "membership x' = " << list(m.xprime) << ", w' = " << list(m.wprime) << ": " << m.answer;
    if (m.v) out << " witness v = " << list(*m.v);
    if (m.gamma) out << ", gamma = " << num(*m.gamma);
    if (!m.branch.empty()) out << " (" << m.branch << ")";
    out << "\n";
    for (const std::string& note : m.notes) out << "  note: " << note << "\n";
  }
  if (doc.probe) {
    const ProbeEntry& p = *doc.probe;
    out << "probe: " << p.flag << " (seed " << p.seed << ", " << p.samples << " samples per level, rho_U = "
        << num(p.rho_u) << ", g = " << num(p.growth) << ", R = " << num(p.blowup) << ")\n";
    for (const LevelEntry& l : p.levels) {
      out << "  delta = " << num(l.delta) << ": worst ratio " << num(l.worst_ratio) << ", median "
          << num(l.median_ratio) << ", pairs " << l.pairs << ", empty-value events " << l.empty_events << "\n";
    }
    for (const std::string& w : p.warnings) out << "  warning: " << w << "\n";
  }
  if (doc.derivatives) {
    const DerivativesEntry& d = *doc.derivatives;
    out << "derivatives:\n  Fval = " << num(d.Fval) << "\n  gxf0 = " << list(d.gxf0) << "\n  gxF = "
        << list(d.gxF) << "\n  gwF = " << list(d.gwF) << "\n  Hxx = " << rows(d.Hxx) << "\n  Hwx = "
        << rows(d.Hwx) << "\n  Fxx = " << rows(d.Fxx) << "\n  Fwx = " << rows(d.Fwx) << "\n";
    if (d.audit_step) {
      out << "finite-difference audit (h = " << num(*d.audit_step) << "):";
      for (const AuditEntry& a : d.audit) out << " " << a.block << " " << num(a.max_abs_deviation);
      out << "; worst " << num(d.audit_worst.value_or(0.0)) << "\n";
    }
  }
  for (const std::string& w : doc.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace aubin::io
