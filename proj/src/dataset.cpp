#include "treereg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace treereg {
namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error("non-numeric cell at row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": '" + s + "'");
  }
  return v;
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, int target_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset: " + path);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_row(line);
  const std::size_t width = header.size();
  if (width < 2) throw std::runtime_error("dataset needs at least two columns");
  const std::size_t target = target_column < 0 ? width - 1 : static_cast<std::size_t>(target_column);
  if (target >= width) throw std::runtime_error("target column out of range");

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != width) throw std::runtime_error("ragged row " + std::to_string(row_number));
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) values[c] = parse_cell(cells[c], row_number, c);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("dataset has no rows: " + path);

  Dataset out;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != target) out.columns.push_back(trim(header[c]));
  }
  out.columns.push_back(trim(header[target]));

  const Eigen::Index m = static_cast<Eigen::Index>(width - 1);
  out.samples.reserve(rows.size());
  for (const auto& r : rows) {
    Sample s{Vector(m + 1), r[target]};
    Eigen::Index at = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c != target) s.x_ext[at++] = r[c];
    }
    s.x_ext[m] = 1.0;
    out.samples.push_back(std::move(s));
  }
  out.scale = normalize_stream(out.samples);
  for (std::size_t i = 0; i < out.scale.inputs.size(); ++i) {
    if (out.scale.inputs[i].constant()) out.warnings.push_back("constant column '" + out.columns[i] + "' mapped to 0");
  }
  if (out.scale.target.constant()) out.warnings.push_back("constant target column mapped to 0");
  return out;
}

Normalization fit_normalization(const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("fit_normalization: empty stream");
  const Eigen::Index m = samples.front().x_ext.size() - 1;
  Normalization n;
  n.inputs.assign(static_cast<std::size_t>(m), AffineScale{INFINITY, -INFINITY});
  n.target = {INFINITY, -INFINITY};
  for (const Sample& s : samples) {
    for (Eigen::Index i = 0; i < m; ++i) {
      auto& a = n.inputs[static_cast<std::size_t>(i)];
      a.lo = std::min(a.lo, s.x_ext[i]);
      a.hi = std::max(a.hi, s.x_ext[i]);
    }
    n.target.lo = std::min(n.target.lo, s.d);
    n.target.hi = std::max(n.target.hi, s.d);
  }
  return n;
}

Normalization normalize_stream(std::vector<Sample>& samples) {
  const Normalization n = fit_normalization(samples);
  for (Sample& s : samples) {
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      s.x_ext[k] = n.inputs[i].forward(s.x_ext[k]);
    }
    s.d = n.target.forward(s.d);
  }
  return n;
}

}  // namespace treereg
