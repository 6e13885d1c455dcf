#include "glorenz/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glorenz/errors.hpp"
#include "json.hpp"

namespace glorenz {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_plot_data(const PlotSeries& series, const std::string& path, const std::string& config_hash) {
  if (series.columns.empty() || series.values.empty()) throw Error(ErrorKind::Domain, "empty plot series");
  const std::size_t w = series.columns.size();
  if (series.values.size() % w != 0) throw Error(ErrorKind::Domain, "ragged plot series");
  std::string body;
  body.reserve(series.values.size() * 24);
  for (std::size_t c = 0; c < w; ++c) body += (c ? "," : "") + series.columns[c];
  body += '\n';
  char buf[32];
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof buf, series.values[i]);
    body.append(buf, res.ptr);
    body += (i % w + 1 == w) ? '\n' : ',';
  }
  write_text_artifact(path, body, config_hash);
}

void write_text_artifact(const std::string& path, const std::string& body, const std::string& config_hash) {
  auto out = open_out(path);
  out << "# config-hash " << config_hash << '\n' << body;
  finish(out, path);
}

void write_json_artifact(const std::string& path, const std::string& json_text, const std::string& config_hash) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(json_text);
  j["provenance"] = {{"config_hash", config_hash}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

std::string read_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string line, body;
  bool header = true;
  while (std::getline(in, line)) {
    if (header && !line.empty() && line[0] == '#') continue;
    header = false;
    body += line;
    body += '\n';
  }
  return body;
}

PlotSeries read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  PlotSeries s;
  std::size_t width = 0;
  std::string line;
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    row.clear();
    bool numeric = true;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc() || res.ptr != comma) {
        numeric = false;
        break;
      }
      row.push_back(v);
      p = comma + 1;
    }
    if (!numeric) {
      if (width == 0 && s.columns.empty()) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) s.columns.push_back(cell);
        width = s.columns.size();
        continue;
      }
      throw Error(ErrorKind::Io, "non-numeric row in " + path);
    }
    if (width == 0) width = row.size();
    if (row.size() != width) throw Error(ErrorKind::Io, "ragged row in " + path);
    s.values.insert(s.values.end(), row.begin(), row.end());
  }
  if (s.columns.empty()) {
    for (std::size_t c = 0; c < width; ++c) s.columns.push_back("c" + std::to_string(c));
  }
  return s;
}

}  // namespace glorenz
