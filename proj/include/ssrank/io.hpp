#pragma once

// Text formats (.tree, .vec, .fam, .op.json) and the construction report.
// Files always name nodes by token, never by chi index.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssrank/construction.hpp"
#include "ssrank/min_ratio.hpp"
#include "ssrank/node.hpp"
#include "ssrank/operators.hpp"
#include "ssrank/schreier.hpp"
#include "ssrank/tree.hpp"
#include "ssrank/zpq.hpp"

namespace ssrank {

class FormatError : public std::invalid_argument {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::invalid_argument(line ? "line " + std::to_string(line) + ": " + what : what) {}
};

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::string strip_comment(const std::string& line) { return trim(line.substr(0, line.find('#'))); }

inline double parse_double(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw FormatError("not a finite number: '" + t + "'", line);
  }
  return v;
}

inline std::uint64_t parse_positive(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || v == 0) {
    throw FormatError("not a positive integer: '" + t + "'", line);
  }
  return v;
}

inline Node parse_node(const std::string& text, std::size_t line) {
  try {
    return Node::parse(trim(text));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what(), line);
  }
}

}  // namespace detail

// Twelve digits after the leading one, as in 1.414213562373.
inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.13g", x);
  return buf;
}

inline std::string format_number(LogReal x) {
  if (x.fits_double()) return format_number(x.to_double());
  return "2^" + format_number(static_cast<double>(x.log2()));
}

// Comma-separated positive integers, sorted and deduplicated.
inline IntSet parse_int_set(const std::string& text, std::size_t line = 0) {
  IntSet out;
  if (detail::trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(detail::parse_positive(part, line));
  return make_set(out);
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(detail::parse_double(part, 0));
  if (out.empty()) throw FormatError("empty list", 0);
  return out;
}

inline std::string format_int_set(const IntSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

struct TreeFile {
  FiniteTree tree;
  bool was_closed;
};

inline TreeFile read_tree(std::istream& in) {
  NodeSet nodes;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const std::string t = detail::strip_comment(line);
    if (!t.empty()) nodes.insert(detail::parse_node(t, no));
  }
  const bool closed = is_closed(nodes);
  return {FiniteTree(closure(nodes)), closed};
}

inline void write_tree(std::ostream& out, const FiniteTree& tree) {
  for (const Node& t : tree.nodes()) out << t.token() << '\n';
}

inline SparseTreeVector read_vector(std::istream& in) {
  SparseTreeVector z;
  NodeSet seen;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const std::string t = detail::strip_comment(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError("expected token=value", no);
    const Node node = detail::parse_node(t.substr(0, eq), no);
    if (!seen.insert(node).second) throw FormatError("node " + node.token() + " listed twice", no);
    z.set(node, detail::parse_double(t.substr(eq + 1), no));
  }
  return z;
}

inline void write_vector(std::ostream& out, const SparseTreeVector& z) {
  char buf[64];
  for (const auto& [node, value] : z.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << node.token() << '=' << buf << '\n';
  }
}

// One set per line, a blank line is the empty set. The universe is the
// largest element unless given.
inline FiniteFamily read_family(std::istream& in, int universe = -1) {
  std::vector<IntSet> sets;
  std::uint64_t top = 0;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    IntSet s = parse_int_set(line, no);
    if (!s.empty()) top = std::max(top, s.back());
    sets.push_back(std::move(s));
  }
  if (universe < 0) {
    if (top > static_cast<std::uint64_t>(FiniteFamily::kMaxUniverse)) {
      throw FormatError("elements above 63 are not supported", 0);
    }
    universe = static_cast<int>(top);
  }
  return FiniteFamily(universe, sets);
}

inline void write_family(std::ostream& out, const FiniteFamily& fam) {
  for (const IntSet& s : fam.sets()) out << format_int_set(s) << '\n';
}

inline nlohmann::ordered_json vector_json(const SparseTreeVector& z) {
  nlohmann::ordered_json col = nlohmann::ordered_json::object();
  for (const auto& [node, value] : z.entries()) col[node.token()] = value;
  return col;
}

inline OperatorSection operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("M") || !j.contains("columns")) {
    throw FormatError("operator file needs \"M\" and \"columns\"", 0);
  }
  const auto m = j.at("M").get<std::int64_t>();
  const auto& cols = j.at("columns");
  if (!cols.is_array() || m < 1 || static_cast<std::int64_t>(cols.size()) != m) {
    throw FormatError("\"columns\" must hold M entries", 0);
  }
  std::vector<SparseTreeVector> columns;
  for (const auto& c : cols) {
    if (!c.is_object()) throw FormatError("each column is an object of token: value", 0);
    SparseTreeVector z;
    for (const auto& [tok, v] : c.items()) {
      if (!v.is_number()) throw FormatError("value of " + tok + " is not a number", 0);
      z.set(detail::parse_node(tok, 0), v.get<double>());
    }
    columns.push_back(std::move(z));
  }
  return OperatorSection(std::move(columns));
}

inline OperatorSection read_operator(std::istream& in) {
  try {
    return operator_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what(), 0);
  }
}

inline nlohmann::ordered_json operator_json(const OperatorSection& op) {
  nlohmann::ordered_json j;
  j["M"] = op.dimension();
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : op.columns()) j["columns"].push_back(vector_json(c));
  return j;
}

// Numbers are cut to the printed precision so that reports do not depend on
// the last bits of a floating-point sum.
inline double rounded(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

inline nlohmann::ordered_json number_json(LogReal x) {
  if (!x.is_finite()) return nullptr;
  if (x.fits_double()) return rounded(x.to_double());
  return {{"log2", rounded(static_cast<double>(x.log2()))}};
}

inline nlohmann::ordered_json count_json(const Count& c) {
  if (c.is_exact()) return c.exact();
  return {{"log2", rounded(static_cast<double>(c.log2()))}};
}

inline nlohmann::ordered_json check_json(const BoundCheck& c) {
  return {{"value", number_json(c.value)}, {"bound", number_json(c.bound)}, {"pass", c.pass}};
}

// F_i and a_n are run-length encoded: [first, last] intervals.
inline nlohmann::ordered_json report_json(const ConstructionReport& rep) {
  using J = nlohmann::ordered_json;
  J j;
  j["params"] = {{"p", rep.params.p()},
                 {"q", rep.params.q()},
                 {"delta", rep.params.delta()},
                 {"theta", rep.params.theta()},
                 {"family", rep.family}};
  j["N"] = rep.selection.N;
  J rounds = J::array();
  J f = J::array();
  for (const Round& r : rep.selection.rounds) {
    const J interval = J::array({count_json(r.start), count_json(r.end())});
    rounds.push_back({{"k", count_json(r.k)}, {"eps", number_json(r.eps())}, {"F", interval}, {"mu", number_json(r.mu)}});
    f.push_back(interval);
  }
  j["rounds"] = std::move(rounds);
  j["F"] = std::move(f);
  J a = J::array();
  for (const WitnessRun& w : rep.witness.runs) {
    a.push_back({{"from", count_json(w.first)}, {"to", count_json(w.first.plus(w.count).minus(1))},
                 {"value", number_json(w.a)}});
  }
  j["a"] = std::move(a);
  J z = J::array();
  J seg = J::array();
  for (const auto& c : rep.z_norms) z.push_back(check_json(c));
  for (const auto& c : rep.seg_bounds) seg.push_back(check_json(c));
  j["checks"] = {{"s2", rep.s2},
                 {"lp_norm", {{"value", rounded(rep.lp_norm)}, {"pass", rep.lp_pass}}},
                 {"z_norms", std::move(z)},
                 {"seg_bounds", std::move(seg)},
                 {"aggregate", check_json(rep.aggregate)},
                 {"final_y_norm", check_json(rep.final_y_norm)}};
  j["pass"] = rep.pass();
  return j;
}

inline nlohmann::ordered_json sing_tree_json(const SingTreeResult& r, std::int64_t m, std::int64_t universe,
                                             std::int64_t cap) {
  using J = nlohmann::ordered_json;
  J nodes = J::array();
  J flagged = J::array();
  for (const Node& t : r.tree.nodes()) nodes.push_back(t.token());
  for (const Node& t : r.flagged) flagged.push_back(t.token());
  return {{"m", m}, {"universe", universe}, {"cap", cap}, {"order", r.order}, {"nodes", std::move(nodes)},
          {"flagged", std::move(flagged)}};
}

}  // namespace ssrank
