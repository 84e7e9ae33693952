#include "vmdkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vmdkit/error.hpp"

namespace vmdkit::dataset {
namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    throw DataError("csv parse failure at row " + std::to_string(row) + ", column " + std::to_string(col) +
                    ": '" + std::string(cell) + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void SplitConfig::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw InvalidConfig("split fractions must each lie in (0, 1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw InvalidConfig("split fractions must sum to 1");
  }
}

SplitRanges split(std::size_t n, const SplitConfig& cfg) {
  cfg.validate();
  const auto train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.train_frac));
  auto val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.val_frac));
  if (train + val > n) val = n - train;
  SplitRanges r;
  r.train_begin = 0;
  r.train_end = train;
  r.val_begin = train;
  r.val_end = train + val;
  r.test_begin = train + val;
  r.test_end = n;
  return r;
}

Normalization fit_zscore(std::span<const double> x) {
  if (x.empty()) throw DegenerateInput("cannot fit normalization on an empty range");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  if (!(var > 0.0)) throw DegenerateInput("zero-variance series cannot be z-score normalized");
  return Normalization{mean, std::sqrt(var)};
}

RealVec apply_zscore(std::span<const double> x, const Normalization& n) {
  RealVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - n.mean) / n.std;
  return out;
}

RealVec denormalize(std::span<const double> z, const Normalization& n) {
  RealVec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] * n.std + n.mean;
  return out;
}

Normalized zscore_normalize(const signal::TimeSeries& series) {
  auto norm = fit_zscore(series.values);
  signal::TimeSeries out = series;
  out.values = apply_zscore(series.values, norm);
  return Normalized{std::move(out), norm};
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");

  Table table;
  for (auto cell : split_line(line)) table.header.emplace_back(cell);
  table.columns.resize(table.header.size());

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw DataError("csv row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) table.columns[c].push_back(parse_number(cells[c], row, c + 1));
  }
  return table;
}

std::vector<signal::TimeSeries> load_csv(const std::filesystem::path& path, const std::vector<std::string>& columns) {
  Table table = read_table(path);
  std::vector<std::size_t> picks;
  if (columns.empty()) {
    for (std::size_t i = 0; i < table.header.size(); ++i) picks.push_back(i);
  } else {
    for (const auto& name : columns) {
      auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end()) throw DataError("column '" + name + "' not found in '" + path.string() + "'");
      picks.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
  }
  std::vector<signal::TimeSeries> out;
  for (auto i : picks) out.push_back(signal::make_series(table.header[i], std::move(table.columns[i])));
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<signal::TimeSeries>& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  std::size_t rows = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << (i ? "," : "") << series[i].id;
    rows = std::max(rows, series[i].size());
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].size() != rows) throw InvalidInput("write_csv: series lengths differ");
      out << (i ? "," : "") << format_double(series[i].values[r]);
    }
    out << '\n';
  }
}

std::vector<Edge> load_edges(const std::filesystem::path& path) {
  Table table = read_table(path);
  if (table.header.size() != 3) throw DataError("edge list must have columns src,dst,weight");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < table.columns[0].size(); ++r) {
    const double s = table.columns[0][r], d = table.columns[1][r];
    if (s < 0 || d < 0 || s != std::floor(s) || d != std::floor(d)) {
      throw DataError("edge row " + std::to_string(r + 2) + " has a non-integer node index");
    }
    edges.push_back(Edge{static_cast<std::size_t>(s), static_cast<std::size_t>(d), table.columns[2][r]});
  }
  return edges;
}

void write_edges(const std::filesystem::path& path, const std::vector<Edge>& edges) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "src,dst,weight\n";
  for (const auto& e : edges) out << e.src << ',' << e.dst << ',' << format_double(e.weight) << '\n';
}

}  // namespace vmdkit::dataset
