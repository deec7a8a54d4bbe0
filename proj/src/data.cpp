#include "trboost/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "trboost/error.hpp"

namespace trboost {
namespace {

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_record(const std::string& line, std::size_t row) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorKind::Schema, "unterminated quote on row " + std::to_string(row),
                Coordinates{row, cells.size() + 1});
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t column) {
  const std::string text = trim(raw);
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  const std::string where = " at row " + std::to_string(row) + ", column " + std::to_string(column);
  if (text.empty()) {
    throw Error(ErrorKind::Schema, "missing value" + where, Coordinates{row, column});
  }
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Schema, "cannot parse '" + text + "'" + where,
                Coordinates{row, column});
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::Schema, "non-finite value '" + text + "'" + where,
                Coordinates{row, column});
  }
  return value;
}

double label_std(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace

void Dataset::validate() const {
  if (labels.empty() || features.cols() == 0) {
    fail(ErrorKind::Domain, "dataset needs at least one row and one feature");
  }
  if (features.rows() != labels.size()) {
    fail(ErrorKind::Domain, "feature rows and label count differ");
  }
  if (!feature_names.empty() && feature_names.size() != features.cols()) {
    fail(ErrorKind::Domain, "feature name count does not match the column count");
  }
  for (double v : features.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::Domain, "dataset contains a non-finite feature");
  }
  for (double v : labels) {
    if (!std::isfinite(v)) fail(ErrorKind::Domain, "dataset contains a non-finite label");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels[i]);
  out.feature_names = feature_names;
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());

  std::vector<std::vector<std::string>> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty()) continue;
    records.push_back(split_record(line, row));
  }
  if (records.empty()) fail(ErrorKind::Schema, path.string() + " is empty");
  return records;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                 bool has_header) {
  const auto records = read_records(path);
  const std::size_t width = records.front().size();
  std::vector<std::string> header;
  if (has_header) {
    for (const auto& cell : records.front()) header.push_back(trim(cell));
  }

  std::size_t label_index = 0;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    if (!has_header) fail(ErrorKind::Schema, "label given by name but the file has no header");
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) fail(ErrorKind::Schema, "no column named '" + *name + "'");
    label_index = static_cast<std::size_t>(it - header.begin());
  } else {
    label_index = std::get<std::size_t>(label_column);
  }
  if (label_index >= width) fail(ErrorKind::Schema, "label column index out of range");
  if (width < 2) fail(ErrorKind::Schema, "need at least one feature column besides the label");

  const std::size_t first = has_header ? 1 : 0;
  const std::size_t n = records.size() - first;
  if (n == 0) fail(ErrorKind::Schema, path.string() + " has no data rows");

  Dataset data;
  data.features = Matrix(n, width - 1);
  data.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[first + r];
    const std::size_t file_row = first + r + 1;
    if (rec.size() != width) {
      throw Error(ErrorKind::Schema,
                  "row " + std::to_string(file_row) + " has " + std::to_string(rec.size()) +
                      " cells, expected " + std::to_string(width),
                  Coordinates{file_row, rec.size()});
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = parse_cell(rec[c], file_row, c + 1);
      if (c == label_index) {
        data.labels[r] = v;
      } else {
        data.features(r, out_col++) = v;
      }
    }
  }
  if (has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_index) data.feature_names.push_back(header[c]);
    }
  }
  return data;
}

Matrix load_feature_matrix(const std::filesystem::path& path, bool has_header) {
  const auto records = read_records(path);
  const std::size_t width = records.front().size();
  const std::size_t first = has_header ? 1 : 0;
  const std::size_t n = records.size() - first;
  if (n == 0) fail(ErrorKind::Schema, path.string() + " has no data rows");
  Matrix x(n, width);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[first + r];
    const std::size_t file_row = first + r + 1;
    if (rec.size() != width) {
      throw Error(ErrorKind::Schema,
                  "row " + std::to_string(file_row) + " has " + std::to_string(rec.size()) +
                      " cells, expected " + std::to_string(width),
                  Coordinates{file_row, rec.size()});
    }
    for (std::size_t c = 0; c < width; ++c) x(r, c) = parse_cell(rec[c], file_row, c + 1);
  }
  return x;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(const Dataset& data, std::ostream& out, const std::string& label_name) {
  for (std::size_t c = 0; c < data.num_features(); ++c) {
    out << (data.feature_names.empty() ? "f" + std::to_string(c) : data.feature_names[c]) << ',';
  }
  out << label_name << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.features.row(r)) out << format_double(v) << ',';
    out << format_double(data.labels[r]) << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_name) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  write_csv(data, out, label_name);
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

SplitIndices split_indices(std::size_t n, double test_fraction, double val_fraction,
                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0) || !(val_fraction >= 0.0 && val_fraction < 1.0)) {
    fail(ErrorKind::Domain, "split fractions must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  const std::size_t rest = n - std::min(n, n_test);
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(rest) * val_fraction));
  const std::size_t n_train = rest - std::min(rest, n_val);
  if (n_test == 0 || n_train == 0 || (val_fraction > 0.0 && n_val == 0) || n_test > n) {
    fail(ErrorKind::Domain, "split of " + std::to_string(n) + " rows leaves an empty block");
  }

  const auto idx = shuffled(n, seed);
  SplitIndices out;
  out.test.assign(idx.begin(), idx.begin() + n_test);
  out.val.assign(idx.begin() + n_test, idx.begin() + n_test + n_val);
  out.train.assign(idx.begin() + n_test + n_val, idx.end());
  return out;
}

Split split(const Dataset& data, double test_fraction, double val_fraction, std::uint64_t seed) {
  const auto idx = split_indices(data.size(), test_fraction, val_fraction, seed);
  return {data.subset(idx.train), data.subset(idx.val), data.subset(idx.test)};
}

Dataset gen_two_gaussians(std::size_t n, std::size_t dims, double separation, std::uint64_t seed) {
  if (n == 0 || n % 2 != 0) fail(ErrorKind::Domain, "n must be positive and even");
  if (dims == 0) fail(ErrorKind::Domain, "dims must be at least 1");
  if (!(separation >= 0.0)) fail(ErrorKind::Domain, "separation must be non-negative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset data;
  data.features = Matrix(n, dims);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double label = static_cast<double>(i % 2);
    const double centre = (label == 1.0 ? 0.5 : -0.5) * separation;
    for (std::size_t j = 0; j < dims; ++j) data.features(i, j) = centre + noise(rng);
    data.labels[i] = label;
  }
  return data;
}

Dataset gen_noisy_regression(std::size_t n, std::size_t dims, double outlier_fraction,
                             double outlier_scale, std::uint64_t seed) {
  if (n == 0 || dims == 0) fail(ErrorKind::Domain, "n and dims must be positive");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    fail(ErrorKind::Domain, "outlier_fraction must lie in [0, 1)");
  }

  std::mt19937_64 weight_rng(0x7472626f6f7374ULL + dims);
  std::uniform_real_distribution<double> weight(-2.0, 2.0);
  std::vector<double> w(dims);
  for (double& v : w) v = weight(weight_rng);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> feature(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  Dataset data;
  data.features = Matrix(n, dims);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const double x = feature(rng);
      data.features(i, j) = x;
      y += w[j] * x;
    }
    data.labels[i] = y + noise(rng);
  }
  if (outlier_fraction > 0.0) inject_outliers(data, outlier_fraction, outlier_scale, seed ^ 0x9e3779b97f4a7c15ULL);
  return data;
}

void inject_outliers(Dataset& data, double fraction, double scale, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) fail(ErrorKind::Domain, "outlier fraction must lie in [0, 1)");
  if (data.labels.empty()) return;
  const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(data.size()) * fraction));
  const double shift = scale * label_std(data.labels);
  const auto idx = shuffled(data.size(), seed);
  std::mt19937_64 rng(seed + 1);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 0; t < k; ++t) {
    data.labels[idx[t]] += coin(rng) ? shift : -shift;
  }
}

}  // namespace trboost
