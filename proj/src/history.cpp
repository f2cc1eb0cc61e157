#include "aebo/history.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace aebo {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("history: bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("history: bad integer '" + s + "'");
  return static_cast<int>(v);
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::runtime_error("history: bad flag '" + s + "'");
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string history_header(int dim) {
  std::string h = "iteration";
  for (int i = 1; i <= dim; ++i) h += ",x_" + std::to_string(i);
  h += ",y,feasible,best,tau";
  for (int i = 1; i <= dim; ++i) h += ",box_lo_" + std::to_string(i);
  for (int i = 1; i <= dim; ++i) h += ",box_hi_" + std::to_string(i);
  h += ",fallback";
  return h;
}

void write_history(std::ostream& out, const RunRecord& record) {
  const int d = record.dim;
  out << history_header(d) << '\n';
  for (const auto& row : record.rows) {
    out << row.iteration;
    for (int i = 0; i < d; ++i) out << ',' << format_real(row.x[i]);
    out << ',' << format_real(row.y) << ',' << (row.feasible ? 1 : 0) << ',' << format_real(row.best) << ','
        << format_real(row.tau);
    for (int i = 0; i < d; ++i) out << ',' << format_real(row.bounds.lower[i]);
    for (int i = 0; i < d; ++i) out << ',' << format_real(row.bounds.upper[i]);
    out << ',' << (row.fallback ? 1 : 0) << '\n';
  }
}

RunRecord read_history(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("history: missing header");
  const auto header = split(line);
  // iteration + d + 4 + 2d + 1 columns
  if (header.size() < 9 || (header.size() - 6) % 3 != 0) throw std::runtime_error("history: malformed header");
  const int d = static_cast<int>((header.size() - 6) / 3);
  if (line != history_header(d)) throw std::runtime_error("history: unexpected header");

  RunRecord record;
  record.dim = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw std::runtime_error("history: wrong column count");
    IterationRow row;
    std::size_t c = 0;
    row.iteration = parse_int(cells[c++]);
    row.x.resize(d);
    for (int i = 0; i < d; ++i) row.x[i] = parse_real(cells[c++]);
    row.y = parse_real(cells[c++]);
    row.feasible = parse_flag(cells[c++]);
    row.best = parse_real(cells[c++]);
    row.tau = parse_real(cells[c++]);
    Vector lo(d);
    Vector hi(d);
    for (int i = 0; i < d; ++i) lo[i] = parse_real(cells[c++]);
    for (int i = 0; i < d; ++i) hi[i] = parse_real(cells[c++]);
    row.bounds = Box(lo, hi);
    row.fallback = parse_flag(cells[c++]);
    record.rows.push_back(std::move(row));
  }

  record.best_y = std::numeric_limits<double>::quiet_NaN();
  if (!record.rows.empty() && !std::isnan(record.rows.back().best)) {
    record.best_y = record.rows.back().best;
    for (const auto& row : record.rows) {
      if (row.feasible && row.y == record.best_y) {
        record.best_x = row.x;
        break;
      }
    }
  }
  record.completed = true;
  return record;
}

}  // namespace aebo
