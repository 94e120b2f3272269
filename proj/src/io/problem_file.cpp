#include "aubin/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aubin/error.hpp"

namespace aubin::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw Error(ErrorCode::Input, "line " + std::to_string(line) + ": " + message);
}

double to_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::Input, "not a real number: '" + std::string(s) + "'");
  }
  return v;
}

long long to_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::Input, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem", {"n", "d", "f0", "F"}},
      {"point", {"x", "w"}},
      {"tolerances", {"tau_act", "tau_zero", "tau_stat", "tau_rank", "tau_col"}},
      {"probe",
       {"delta0", "levels", "samples", "rho_u", "growth", "blowup", "seed", "radial_floor", "r_x",
        "grid_points", "newton_cap", "tau_newton", "accept", "seed_factor"}},
  };
  return keys;
}

Sections split_sections(std::string_view text) {
  Sections sections;
  std::string current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    // '#' outside quotes starts a comment
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!allowed_keys().count(current)) fail(line_no, "unknown section [" + current + "]");
      if (sections.count(current)) fail(line_no, "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    if (current.empty()) fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (!allowed_keys().at(current).count(key)) fail(line_no, "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key)) fail(line_no, "duplicate key '" + key + "'");
    sections[current][key] = {std::string(value), line_no};
  }
  return sections;
}

std::string unquote(const Entry& e) {
  const std::string_view v = e.value;
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') fail(e.line, "expression must be double-quoted");
  return std::string(v.substr(1, v.size() - 2));
}

template <class Fn>
auto with_line(const Entry& e, Fn&& fn) {
  try {
    return fn(e.value);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    fail(e.line, err.what());
  }
}

const Entry& required(const Sections& s, const std::string& section, const std::string& key) {
  const auto sec = s.find(section);
  if (sec == s.end()) throw Error(ErrorCode::Input, "missing section [" + section + "]");
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) throw Error(ErrorCode::Input, "missing key '" + key + "' in [" + section + "]");
  return it->second;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw Error(ErrorCode::Input, "unterminated list");
    text = trim(text.substr(1, text.size() - 2));
  }
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(to_real(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void set_tolerance(calculus::ToleranceConfig& tol, std::string_view key, double value) {
  if (key == "tau_act") tol.act = value;
  else if (key == "tau_zero") tol.zero = value;
  else if (key == "tau_stat") tol.stat = value;
  else if (key == "tau_rank") tol.rank = value;
  else if (key == "tau_col") tol.col = value;
  else throw Error(ErrorCode::Input, "unknown tolerance '" + std::string(key) + "'");
}

void apply_tolerance_overrides(calculus::ToleranceConfig& tol, std::string_view overrides) {
  std::string text(overrides);
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  for (std::string pair; in >> pair;) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Input, "tolerance override must be key=value: " + pair);
    set_tolerance(tol, trim(std::string_view(pair).substr(0, eq)), to_real(std::string_view(pair).substr(eq + 1)));
  }
  tol.validate();
}

ProblemFile parse_problem_file(std::string_view text) {
  const Sections s = split_sections(text);
  ProblemFile pf;

  const auto positive_int = [](std::string_view v) {
    const long long i = to_integer(v);
    if (i < 1 || i > 64) throw Error(ErrorCode::Input, "dimension must be between 1 and 64");
    return static_cast<int>(i);
  };
  const int n = with_line(required(s, "problem", "n"), positive_int);
  const int d = with_line(required(s, "problem", "d"), positive_int);
  pf.f0_source = unquote(required(s, "problem", "f0"));
  pf.F_source = unquote(required(s, "problem", "F"));
  pf.spec = expr::make_problem(n, d, pf.f0_source, pf.F_source);

  const Entry& x = required(s, "point", "x");
  const Entry& w = required(s, "point", "w");
  pf.point.x = to_vector(with_line(x, parse_real_list));
  pf.point.w = to_vector(with_line(w, parse_real_list));
  if (pf.point.x.size() != n) fail(x.line, "x has " + std::to_string(pf.point.x.size()) + " entries, expected " + std::to_string(n));
  if (pf.point.w.size() != d) fail(w.line, "w has " + std::to_string(pf.point.w.size()) + " entries, expected " + std::to_string(d));

  if (const auto it = s.find("tolerances"); it != s.end()) {
    for (const auto& [key, e] : it->second) {
      with_line(e, [&](std::string_view v) {
        set_tolerance(pf.tol, key, to_real(v));
        return 0;
      });
    }
  }
  pf.tol.validate();

  if (const auto it = s.find("probe"); it != s.end()) {
    oracle::ProbeConfig& p = pf.probe;
    oracle::GridSpec& g = pf.grid;
    for (const auto& [key, e] : it->second) {
      with_line(e, [&](std::string_view v) {
        if (key == "delta0") p.delta0 = to_real(v);
        else if (key == "levels") p.levels = static_cast<int>(to_integer(v));
        else if (key == "samples") p.samples = static_cast<int>(to_integer(v));
        else if (key == "rho_u") p.rho_u = to_real(v);
        else if (key == "growth") p.growth = to_real(v);
        else if (key == "blowup") p.blowup = to_real(v);
        else if (key == "seed") p.seed = static_cast<std::uint64_t>(to_integer(v));
        else if (key == "radial_floor") p.radial_floor = to_real(v);
        else if (key == "r_x") g.r_x = to_real(v);
        else if (key == "grid_points") g.m = static_cast<int>(to_integer(v));
        else if (key == "newton_cap") g.newton_cap = static_cast<int>(to_integer(v));
        else if (key == "tau_newton") g.tau_newton = to_real(v);
        else if (key == "accept") g.accept = to_real(v);
        else if (key == "seed_factor") g.seed_factor = to_real(v);
        return 0;
      });
    }
    p.validate();
    g.validate();
  }
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Input, "cannot open problem file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_file(buf.str());
}

}  // namespace aubin::io
