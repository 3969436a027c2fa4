#pragma once

// Text formats. Tournament: first line n, then n rows of '0'/'1' with
// row i column j = adj[i][j]. Coloring: n lines "vertex color". Sequence:
// header "kind k", then one line per element: "role size v1 v2 ...".
// All files are UTF-8 with LF endings.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stellar/sequence.hpp"
#include "stellar/tournament.hpp"

namespace stellar::io {

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

inline Tournament read_tournament(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) parse_fail(lineno, "missing vertex count");
  std::size_t n = 0;
  try {
    size_t used = 0;
    long long v = std::stoll(line, &used);
    if (used != line.size() || v < 0) throw std::invalid_argument("");
    n = static_cast<std::size_t>(v);
  } catch (...) {
    parse_fail(lineno, "bad vertex count '" + line + "'");
  }
  Tournament t(n);
  std::vector<std::string> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    ++lineno;
    if (!std::getline(in, rows[i])) parse_fail(lineno, "missing adjacency row");
    if (rows[i].size() != n)
      parse_fail(lineno, "row has " + std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(n));
    for (std::size_t j = 0; j < n; ++j)
      if (rows[i][j] != '0' && rows[i][j] != '1') parse_fail(lineno, "entry must be '0' or '1'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i][i] != '0')
      fail(ErrorKind::InvariantViolation, "diagonal entry at vertex " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rows[i][j] == rows[j][i])
        fail(ErrorKind::InvariantViolation,
             "pair (" + std::to_string(i) + "," + std::to_string(j) + ") is not oriented exactly once");
      if (rows[i][j] == '1')
        t.orient(i, j);
      else
        t.orient(j, i);
    }
  }
  return t;
}

inline void write_tournament(const Tournament& t, std::ostream& out) {
  out << t.size() << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string row(t.size(), '0');
    for (std::size_t j = 0; j < t.size(); ++j)
      if (i != j && t.edge(i, j)) row[j] = '1';
    out << row << "\n";
  }
}

inline Coloring read_coloring(std::istream& in, std::size_t n) {
  Coloring col;
  col.color.assign(n, 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long v = -1, c = -1;
    if (!(ls >> v >> c) || v < 0 || static_cast<std::size_t>(v) >= n || c <= 0)
      parse_fail(lineno, "expected 'vertex color' with 0 <= vertex < n and color > 0");
    col.color[static_cast<std::size_t>(v)] = c;
  }
  return col;
}

inline void write_coloring(const Coloring& col, std::ostream& out) {
  for (std::size_t v = 0; v < col.color.size(); ++v) out << v << " " << col.color[v] << "\n";
}

inline seq::Sequence read_sequence(std::istream& in, std::size_t universe) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) parse_fail(lineno, "missing sequence header");
  std::istringstream hs(line);
  std::string kind_s;
  std::size_t k = 0;
  if (!(hs >> kind_s >> k)) parse_fail(lineno, "expected 'kind k' header");
  seq::Kind kind;
  if (kind_s == "l")
    kind = seq::Kind::l;
  else if (kind_s == "t")
    kind = seq::Kind::t;
  else if (kind_s == "m")
    kind = seq::Kind::m;
  else
    parse_fail(lineno, "kind must be l, t or m");
  seq::Sequence s{kind, {}};
  for (std::size_t i = 0; i < k; ++i) {
    ++lineno;
    if (!std::getline(in, line)) parse_fail(lineno, "missing sequence element");
    std::istringstream ls(line);
    std::string role_s;
    std::size_t size = 0;
    if (!(ls >> role_s >> size)) parse_fail(lineno, "expected 'role size v1 v2 ...'");
    seq::Role role;
    if (role_s == "L")
      role = seq::Role::linear;
    else if (role_s == "T")
      role = seq::Role::transitive;
    else
      parse_fail(lineno, "role must be L or T");
    Bitset members(universe);
    for (std::size_t j = 0; j < size; ++j) {
      long long v = -1;
      if (!(ls >> v) || v < 0 || static_cast<std::size_t>(v) >= universe)
        parse_fail(lineno, "bad vertex id");
      members.set(static_cast<std::size_t>(v));
    }
    s.elements.push_back({std::move(members), role});
  }
  return s;
}

inline void write_sequence(const seq::Sequence& s, std::ostream& out) {
  const char* kind_s = s.kind == seq::Kind::l ? "l" : s.kind == seq::Kind::t ? "t" : "m";
  out << kind_s << " " << s.elements.size() << "\n";
  for (const auto& e : s.elements) {
    out << (e.role == seq::Role::linear ? "L" : "T") << " " << e.members.count();
    for (auto v : e.members.to_vector()) out << " " << v;
    out << "\n";
  }
}

// Writes via a temp file in the same directory, then renames into place.
template <typename Fn>
void atomic_write(const std::string& path, Fn&& emit) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::ParseError, "cannot open '" + tmp.string() + "' for writing");
    emit(out);
    out.flush();
    if (!out) fail(ErrorKind::ParseError, "write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

inline Tournament read_tournament_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  return read_tournament(in);
}

}  // namespace stellar::io
