#include "twinpoint/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "twinpoint/errors.hpp"

namespace twinpoint {

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Mat read_matrix(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw ConfigError("matrix: missing 'rows cols' header");
  std::istringstream head(line);
  long rows = 0;
  long cols = 0;
  std::string extra;
  if (!(head >> rows >> cols) || (head >> extra) || rows < 1 || cols < 1) {
    throw ConfigError("matrix: bad header '" + line + "'");
  }
  Mat a(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ConfigError("matrix: expected " + std::to_string(rows) + " rows");
    std::istringstream row(line);
    for (long j = 0; j < cols; ++j) {
      if (!(row >> a(i, j))) throw ConfigError("matrix: row " + std::to_string(i + 1) + " is short or malformed");
    }
    if (row >> extra) throw ConfigError("matrix: row " + std::to_string(i + 1) + " has extra entries");
  }
  if (!all_finite(a)) throw ConfigError("matrix: non-finite entry");
  return a;
}

void write_matrix(std::ostream& out, const Mat& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out << (j ? " " : "") << format_double(a(i, j));
    out << '\n';
  }
}

Pencil read_pencil(std::istream& in) {
  Mat l = read_matrix(in);
  Mat c = read_matrix(in);
  Mat w = read_matrix(in);
  try {
    return Pencil(std::move(l), std::move(c), GramMetric(std::move(w)));
  } catch (const NumericError& e) {
    throw ConfigError(std::string("pencil: ") + e.what());
  }
}

void write_pencil(std::ostream& out, const Pencil& p) {
  write_matrix(out, p.L());
  out << '\n';
  write_matrix(out, p.C());
  out << '\n';
  write_matrix(out, p.W().matrix());
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_branch_csv(std::ostream& out, const ProblemSpec& ps, const Branch& branch, const std::vector<int>* winding) {
  out << "step,s,lambda,wnorm,winding,term\n";
  const std::size_t n = branch.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const State& u = branch.points[i].state;
    out << i << ',' << format_double(u.s) << ',' << format_double(u.lambda) << ','
        << format_double(ps.pencil.W().norm(u.c)) << ',';
    if (winding) out << (*winding)[i];
    out << ',';
    if (i == 0) out << termination_name(branch.halves[1]);
    if (i + 1 == n) out << (n == 1 ? "|" : "") << termination_name(branch.halves[0]);
    out << '\n';
  }
}

std::vector<CsvRow> read_branch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,s,lambda,wnorm,winding,term") {
    throw ConfigError("branch csv: unexpected header");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw ConfigError("branch csv: expected 6 fields in '" + line + "'");
    CsvRow r;
    try {
      r.step = std::stoi(f[0]);
      r.s = std::stod(f[1]);
      r.lambda = std::stod(f[2]);
      r.wnorm = std::stod(f[3]);
      if (!f[4].empty()) r.winding = std::stoi(f[4]);
    } catch (const std::exception&) {
      throw ConfigError("branch csv: malformed number in '" + line + "'");
    }
    r.term = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_svg(std::ostream& out, const std::vector<PlotBranch>& branches) {
  constexpr double width = 640;
  constexpr double height = 480;
  constexpr double margin = 48;
  double s_lo = -1, s_hi = 1, l_lo = -1, l_hi = 1;
  bool first = true;
  auto include = [&](double s, double l) {
    if (first) {
      s_lo = s_hi = s;
      l_lo = l_hi = l;
      first = false;
    }
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
    l_lo = std::min(l_lo, l);
    l_hi = std::max(l_hi, l);
  };
  for (const auto& b : branches) {
    for (const auto& [s, l] : b.path) include(s, l);
    for (const auto& [s, l] : b.markers) include(s, l);
  }
  if (s_hi - s_lo < 1e-12) s_lo -= 1, s_hi += 1;
  if (l_hi - l_lo < 1e-12) l_lo -= 1, l_hi += 1;
  const double sx = (width - 2 * margin) / (s_hi - s_lo);
  const double sy = (height - 2 * margin) / (l_hi - l_lo);
  auto px = [&](double s) { return margin + (s - s_lo) * sx; };
  auto py = [&](double l) { return height - margin - (l - l_lo) * sy; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
      << height - 2 * margin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  if (s_lo <= 0 && s_hi >= 0) {
    out << "<line x1=\"" << num(px(0)) << "\" y1=\"" << margin << "\" x2=\"" << num(px(0)) << "\" y2=\""
        << height - margin << "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">s  [" << num(s_lo)
      << ", " << num(s_hi) << "]</text>\n";
  out << "<text x=\"14\" y=\"" << height / 2 << "\" transform=\"rotate(-90 14 " << height / 2
      << ")\" text-anchor=\"middle\">lambda  [" << num(l_lo) << ", " << num(l_hi) << "]</text>\n";
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    out << "<polyline class=\"branch\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < branches[i].path.size(); ++j) {
      out << (j ? " " : "") << num(px(branches[i].path[j].first)) << ',' << num(py(branches[i].path[j].second));
    }
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < branches.size(); ++i) {
    for (const auto& [s, l] : branches[i].markers) {
      out << "<circle class=\"trivial\" cx=\"" << num(px(s)) << "\" cy=\"" << num(py(l))
          << "\" r=\"4\" fill=\"black\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace twinpoint
