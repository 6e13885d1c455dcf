#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace glorenz {

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

/// Column-labelled numeric table for plotting tools, row-major.
struct PlotSeries {
  std::vector<std::string> columns;
  std::vector<double> values;

  std::size_t rows() const { return columns.empty() ? 0 : values.size() / columns.size(); }
  void add_row(std::initializer_list<double> row) { values.insert(values.end(), row); }
};

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

/// CSV with a leading "# config-hash <hash>" line, then header and rows in
/// the given order. Throws Io when the path cannot be written.
void emit_plot_data(const PlotSeries& series, const std::string& path, const std::string& config_hash);

/// Writes text verbatim after a "# config-hash" line (CSV and other line
/// formats). Throws Io on failure.
void write_text_artifact(const std::string& path, const std::string& body, const std::string& config_hash);

/// Writes a JSON document with a top-level "provenance" object added.
void write_json_artifact(const std::string& path, const std::string& json_text, const std::string& config_hash);

/// Text of a file, skipping leading '#' comment lines. Throws Io.
std::string read_artifact(const std::string& path);

/// Numeric CSV reader: skips '#' lines; a non-numeric first row becomes the
/// column names. Throws Io on unreadable files or ragged/non-numeric rows.
PlotSeries read_csv(const std::string& path);

}  // namespace glorenz
