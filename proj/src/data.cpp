#include "mirs/data.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mirs/errors.hpp"

namespace mirs {

std::size_t DataMatrix::n_missing() const {
  std::size_t count = 0;
  for (std::uint8_t obs : y_observed) count += obs ? 0 : 1;
  return count;
}

void DataMatrix::validate() const {
  const std::size_t len = x1.size();
  if (x2.size() != len || y.size() != len || y_observed.size() != len ||
      source.size() != len || p_s.size() != len || case_id.size() != len)
    throw InputError("DataMatrix columns have inconsistent lengths");
  for (std::size_t i = 0; i < len; ++i) {
    if (!(p_s[i] > 0.0 && p_s[i] <= 1.0))
      throw InputError("p_s outside (0, 1] at row " + std::to_string(i));
  }
}

std::vector<double> DataMatrix::complete_y() const {
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    if (!y_observed[i])
      throw EstimateError(
          "outcome has masked entries; impute before estimating");
    out[i] = static_cast<double>(y[i]);
  }
  return out;
}

void DataMatrix::reserve(std::size_t cap) {
  x1.reserve(cap);
  x2.reserve(cap);
  y.reserve(cap);
  y_observed.reserve(cap);
  source.reserve(cap);
  p_s.reserve(cap);
  case_id.reserve(cap);
}

void DataMatrix::push_row(double x1v, double x2v, std::int8_t yv,
                          bool observed, Source src, double ps,
                          std::uint64_t id) {
  x1.push_back(x1v);
  x2.push_back(x2v);
  y.push_back(yv);
  y_observed.push_back(observed ? 1 : 0);
  source.push_back(src);
  p_s.push_back(ps);
  case_id.push_back(id);
}

bool same_data(const DataMatrix& a, const DataMatrix& b) {
  if (a.n() != b.n()) return false;
  for (std::size_t i = 0; i < a.n(); ++i) {
    if (a.x1[i] != b.x1[i] || a.x2[i] != b.x2[i] ||
        a.y_observed[i] != b.y_observed[i] || a.source[i] != b.source[i] ||
        a.p_s[i] != b.p_s[i] || a.case_id[i] != b.case_id[i])
      return false;
    if (a.y_observed[i] && a.y[i] != b.y[i]) return false;
  }
  return true;
}

namespace {

double parse_double(const std::string& field, const char* name, long line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw InputError(std::string("bad ") + name + " value '" + field +
                     "' at line " + std::to_string(line));
  return value;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

DataMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,y,source,p_s")
    throw InputError("expected header 'x1,x2,y,source,p_s', got '" + line +
                     "'");

  DataMatrix data;
  long line_no = 1;
  std::uint64_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5)
      throw InputError("expected 5 fields at line " + std::to_string(line_no) +
                       ", got " + std::to_string(fields.size()));

    const double x1v = parse_double(fields[0], "x1", line_no);
    const double x2v = parse_double(fields[1], "x2", line_no);

    std::int8_t yv = 0;
    bool observed = false;
    if (!fields[2].empty()) {
      if (fields[2] == "0") {
        yv = 0;
      } else if (fields[2] == "1") {
        yv = 1;
      } else {
        throw InputError("y must be 0, 1 or empty at line " +
                         std::to_string(line_no));
      }
      observed = true;
    }

    Source src;
    if (fields[3] == "prob") {
      src = Source::Probability;
    } else if (fields[3] == "conv") {
      src = Source::Convenience;
    } else {
      throw InputError("unknown source '" + fields[3] + "' at line " +
                       std::to_string(line_no));
    }

    const double ps = parse_double(fields[4], "p_s", line_no);
    if (!(ps > 0.0 && ps <= 1.0))
      throw InputError("p_s outside (0, 1] at line " +
                       std::to_string(line_no));

    data.push_row(x1v, x2v, yv, observed, src, ps, row << 32);
    ++row;
  }
  return data;
}

void write_csv(const DataMatrix& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "x1,x2,y,source,p_s\n";
  char buf[64];
  for (std::size_t i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", data.x1[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", data.x2[i]);
    out << buf << ',';
    if (data.y_observed[i]) out << static_cast<int>(data.y[i]);
    out << ',' << (data.source[i] == Source::Probability ? "prob" : "conv")
        << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", data.p_s[i]);
    out << buf << '\n';
  }
  if (!out) throw InputError("I/O failure writing '" + path + "'");
}

}  // namespace mirs
