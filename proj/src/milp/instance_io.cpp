// Copyright 2026 The nodecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nodecomp/errors.hpp"
#include "nodecomp/milp.hpp"

namespace nodecomp {

namespace {

std::string format_double(double v) {
  if (v >= kInfSentinel) v = kInfSentinel;
  if (v <= -kInfSentinel) v = -kInfSentinel;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

char vtype_code(VarType t) {
  switch (t) {
    case VarType::kBinary:
      return 'B';
    case VarType::kInteger:
      return 'I';
    case VarType::kContinuous:
      return 'C';
  }
  return '?';
}

char sense_code(Sense s) {
  switch (s) {
    case Sense::kGe:
      return 'G';
    case Sense::kLe:
      return 'L';
    case Sense::kEq:
      return 'E';
  }
  return '?';
}

double parse_double(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) throw ParseError(line, "trailing characters in number '" + tok + "'");
  if (v >= kInfSentinel) return kInf;
  if (v <= -kInfSentinel) return -kInf;
  return v;
}

long parse_index(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  long v;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) throw ParseError(line, "trailing characters in integer '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

}  // namespace

void write_instance(const MilpInstance& inst, std::ostream& out) {
  inst.validate();
  if (inst.name.empty() || inst.name.find_first_of(" \t\r\n") != std::string::npos) {
    throw FormatError("instance name must be a single non-empty token");
  }
  out << "MILP " << inst.name << ' ' << inst.num_vars() << ' ' << inst.num_cons() << '\n';
  out << "OBJ";
  for (double c : inst.objective) out << ' ' << format_double(c);
  out << '\n';
  for (std::size_t j = 0; j < inst.num_vars(); ++j) {
    out << "VAR " << j << ' ' << vtype_code(inst.vtypes[j]) << ' ' << format_double(inst.lower[j]) << ' '
        << format_double(inst.upper[j]) << '\n';
  }
  for (const Row& row : inst.rows) {
    out << "ROW " << sense_code(row.sense) << ' ' << format_double(row.rhs) << ' ' << row.entries.size();
    for (const RowEntry& e : row.entries) out << ' ' << e.index << ':' << format_double(e.coef);
    out << '\n';
  }
}

void write_instance(const MilpInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_instance(inst, out);
  if (!out) throw Error("write failed: " + path.string());
}

MilpInstance read_instance(std::istream& in) {
  MilpInstance inst;
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      auto toks = split(line);
      if (!toks.empty()) return toks;
    }
    throw ParseError(lineno, "unexpected end of file");
  };

  auto header = next_line();
  if (header.size() != 4 || header[0] != "MILP") throw ParseError(lineno, "expected 'MILP <name> <vars> <cons>'");
  inst.name = header[1];
  const long n = parse_index(header[2], lineno);
  const long m = parse_index(header[3], lineno);
  if (n < 0 || m < 0) throw ParseError(lineno, "negative dimensions");

  auto obj = next_line();
  if (obj.empty() || obj[0] != "OBJ" || obj.size() != static_cast<std::size_t>(n) + 1) {
    throw ParseError(lineno, "expected 'OBJ' followed by " + std::to_string(n) + " coefficients");
  }
  for (long j = 0; j < n; ++j) {
    const double c = parse_double(obj[j + 1], lineno);
    if (!std::isfinite(c)) throw ParseError(lineno, "objective coefficient must be finite");
    inst.objective.push_back(c);
  }

  inst.lower.resize(n);
  inst.upper.resize(n);
  inst.vtypes.resize(n);
  for (long j = 0; j < n; ++j) {
    auto t = next_line();
    if (t.size() != 5 || t[0] != "VAR") throw ParseError(lineno, "expected 'VAR <idx> <type> <lb> <ub>'");
    if (parse_index(t[1], lineno) != j) throw ParseError(lineno, "VAR lines must be in index order");
    if (t[2] == "B") {
      inst.vtypes[j] = VarType::kBinary;
    } else if (t[2] == "I") {
      inst.vtypes[j] = VarType::kInteger;
    } else if (t[2] == "C") {
      inst.vtypes[j] = VarType::kContinuous;
    } else {
      throw ParseError(lineno, "unknown variable type '" + t[2] + "'");
    }
    inst.lower[j] = parse_double(t[3], lineno);
    inst.upper[j] = parse_double(t[4], lineno);
    if (inst.lower[j] > inst.upper[j]) throw ParseError(lineno, "lower bound exceeds upper bound");
    if (inst.vtypes[j] == VarType::kBinary && (inst.lower[j] < 0.0 || inst.upper[j] > 1.0)) {
      throw ParseError(lineno, "binary bounds outside [0,1]");
    }
  }

  for (long i = 0; i < m; ++i) {
    auto t = next_line();
    if (t.size() < 4 || t[0] != "ROW") throw ParseError(lineno, "expected 'ROW <sense> <rhs> <nnz> ...'");
    Row row;
    if (t[1] == "G") {
      row.sense = Sense::kGe;
    } else if (t[1] == "L") {
      row.sense = Sense::kLe;
    } else if (t[1] == "E") {
      row.sense = Sense::kEq;
    } else {
      throw ParseError(lineno, "unknown row sense '" + t[1] + "'");
    }
    row.rhs = parse_double(t[2], lineno);
    if (!std::isfinite(row.rhs)) throw ParseError(lineno, "rhs must be finite");
    const long nnz = parse_index(t[3], lineno);
    if (nnz < 0 || t.size() != static_cast<std::size_t>(nnz) + 4) {
      throw ParseError(lineno, "row entry count does not match nnz");
    }
    std::vector<char> seen(n, 0);
    for (long k = 0; k < nnz; ++k) {
      const std::string& tok = t[4 + k];
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(lineno, "row entry must be idx:coef");
      const long idx = parse_index(tok.substr(0, colon), lineno);
      if (idx < 0 || idx >= n) throw ParseError(lineno, "row index out of range");
      if (seen[idx]) throw ParseError(lineno, "duplicate index " + std::to_string(idx) + " in row");
      seen[idx] = 1;
      const double coef = parse_double(tok.substr(colon + 1), lineno);
      if (coef == 0.0 || !std::isfinite(coef)) throw ParseError(lineno, "row coefficients must be finite and nonzero");
      row.entries.push_back({static_cast<int>(idx), coef});
    }
    inst.rows.push_back(std::move(row));
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (!split(line).empty()) throw ParseError(lineno, "trailing content after last row");
  }
  return inst;
}

MilpInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open instance: " + path.string());
  return read_instance(in);
}

std::string instance_to_string(const MilpInstance& inst) {
  std::ostringstream os;
  write_instance(inst, os);
  return os.str();
}

MilpInstance instance_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

}  // namespace nodecomp
