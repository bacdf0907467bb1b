#include "sketchkrr/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sketchkrr {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.m << ',' << to_string(r.sketch) << ',' << r.trial << ',' << r.seed << ','
        << format_double(r.lambda) << ',' << format_double(r.delta_n_sq) << ',' << r.d_n << ','
        << format_double(r.error) << ',' << format_double(r.rescaled_error) << ','
        << format_double(r.wall_time_ms) << '\n';
  }
}

void write_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

template <typename T>
T field(const std::string& text, int line, const char* name) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream os;
    os << "line " << line << ": bad " << name << " value '" << text << "'";
    throw std::runtime_error(os.str());
  }
  return value;
}

}  // namespace

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("line 1: unexpected header '" + line + "'");

  std::vector<TrialRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 11) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 11 fields, got " << cols.size();
      throw std::runtime_error(os.str());
    }
    TrialRecord r;
    r.n = field<Eigen::Index>(cols[0], lineno, "n");
    r.m = field<Eigen::Index>(cols[1], lineno, "m");
    try {
      r.sketch = parse_arm(cols[2]);
    } catch (const std::exception&) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": bad sketch value '" + cols[2] + "'");
    }
    r.trial = field<int>(cols[3], lineno, "trial");
    r.seed = field<std::uint64_t>(cols[4], lineno, "seed");
    r.lambda = field<double>(cols[5], lineno, "lambda");
    r.delta_n_sq = field<double>(cols[6], lineno, "delta_n_sq");
    r.d_n = field<Eigen::Index>(cols[7], lineno, "d_n");
    r.error = field<double>(cols[8], lineno, "error");
    r.rescaled_error = field<double>(cols[9], lineno, "rescaled_error");
    r.wall_time_ms = field<double>(cols[10], lineno, "wall_time_ms");
    out.push_back(r);
  }
  return out;
}

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  try {
    return read_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace sketchkrr
