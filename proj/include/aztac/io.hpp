#pragma once

// Config parsing (flat key = value), CSV/JSON emission with run metadata,
// and SVG tiling rendering with the arctic-ellipse overlay.

#include <map>
#include <string>
#include <vector>

#include "aztac/geometry.hpp"

namespace aztac {

inline constexpr const char* kToolVersion = "aztac 1.0.0";

// `key = value` lines, '#' comments, arrays as comma-separated lists.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

std::vector<double> parse_double_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

// Deterministic number formatting used in every emitted file.
std::string fmt_num(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> metadata;  // emitted as leading comments

  void add_row(const std::vector<std::string>& row);
  std::string to_csv() const;
  std::string to_json() const;  // rows as objects plus a metadata block
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct RenderSpec {
  int cell_px = 14;
  bool height_labels = false;
  bool level_lines = false;
  bool ellipses = false;
  // N, S, E, W fill colors
  std::string color_n = "#d94141";
  std::string color_s = "#3b6fd4";
  std::string color_e = "#3fae5a";
  std::string color_w = "#e0b23c";
};

// Deterministic byte-for-byte SVG of a tiling.
std::string render_svg(const Tiling& t, const RenderSpec& spec);

}  // namespace aztac
