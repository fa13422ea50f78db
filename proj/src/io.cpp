#include "aztac/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aztac {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " has an empty key");
    out[key] = val;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("csv row width mismatch");
  rows.push_back(row);
}

std::string CsvTable::to_csv() const {
  std::ostringstream os;
  for (const auto& [k, v] : metadata) os << "# " << k << " = " << v << "\n";
  for (size_t c = 0; c < columns.size(); ++c)
    os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c)
      os << r[c] << (c + 1 < r.size() ? "," : "\n");
  return os.str();
}

std::string CsvTable::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  j["columns"] = columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    for (size_t c = 0; c < r.size(); ++c) row[columns[c]] = r[c];
    j["rows"].push_back(row);
  }
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string render_svg(const Tiling& t, const RenderSpec& spec) {
  const Region& rg = t.region();
  const auto& cells = rg.cells();
  int lo_i = 1 << 29, hi_i = -(1 << 29), lo_j = 1 << 29, hi_j = -(1 << 29);
  for (const Cell& c : cells) {
    lo_i = std::min(lo_i, c.i);
    hi_i = std::max(hi_i, c.i + 1);
    lo_j = std::min(lo_j, c.j);
    hi_j = std::max(hi_j, c.j + 1);
  }
  const int px = spec.cell_px;
  const int wpx = (hi_i - lo_i) * px, hpx = (hi_j - lo_j) * px;
  // lattice y-axis up: SVG y = (hi_j - j) * px
  auto X = [&](double i) { return (i - lo_i) * px; };
  auto Y = [&](double j) { return (hi_j - j) * px; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx
     << "\" height=\"" << hpx << "\" viewBox=\"0 0 " << wpx << " " << hpx
     << "\">\n";
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    int p = t.partner(static_cast<int>(ci));
    if (p < static_cast<int>(ci)) continue;
    const Cell& c = cells[ci];
    const Cell& q = cells[p];
    bool horiz = (c.j == q.j);
    int i0 = std::min(c.i, q.i), j0 = std::min(c.j, q.j);
    int wd = horiz ? 2 : 1, ht = horiz ? 1 : 2;
    const char* fill = nullptr;
    switch (t.compass_at(static_cast<int>(ci))) {
      case Compass::N: fill = spec.color_n.c_str(); break;
      case Compass::S: fill = spec.color_s.c_str(); break;
      case Compass::E: fill = spec.color_e.c_str(); break;
      case Compass::W: fill = spec.color_w.c_str(); break;
    }
    os << "<rect x=\"" << fmt_num(X(i0)) << "\" y=\"" << fmt_num(Y(j0 + ht))
       << "\" width=\"" << wd * px << "\" height=\"" << ht * px
       << "\" fill=\"" << fill << "\" stroke=\"#222\" stroke-width=\"1\"/>\n";
  }
  if (spec.level_lines) {
    // outlier paths drawn through the dot positions of the even axes
    auto paths = level_lines(t, HeightKind::h);
    const int n = rg.shape().n, m = rg.shape().m;
    for (const auto& path : paths) {
      os << "<polyline fill=\"none\" stroke=\"#111\" stroke-width=\"1.5\" points=\"";
      for (int ell = 0; ell <= 2 * n + 1; ++ell) {
        int y = path[ell];
        // axis ell crosses the anti-diagonal i+j = ell-n-2; use the cell
        // midpoint at Y-coordinate y
        double jmid = y - m - 1 + 0.5;
        double imid = (ell - n - 2) - (y - m - 1) + 0.5;
        os << fmt_num(X(imid)) << "," << fmt_num(Y(jmid)) << " ";
      }
      os << "\"/>\n";
    }
  }
  if (spec.ellipses) {
    const double a = rg.shape().a;
    const double q = a / (a + 1.0 / a), p = 1.0 - q;
    const int n = rg.shape().n;
    auto ellipse = [&](double cx, double cy) {
      os << "<ellipse cx=\"" << fmt_num(X(cx)) << "\" cy=\"" << fmt_num(Y(cy))
         << "\" rx=\"" << fmt_num(std::sqrt(p) * n * px) << "\" ry=\""
         << fmt_num(std::sqrt(q) * n * px)
         << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\" "
            "stroke-dasharray=\"6,4\"/>\n";
    };
    if (rg.kind() == Region::Kind::SingleDiamond) {
      ellipse(-0.5, -0.5);
    } else {
      const int m = rg.shape().m;
      ellipse(-0.5, -0.5);                          // diamond A
      ellipse(2 * m - 0.5, -(2 * m + 1) - 0.5);     // diamond B
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace aztac
