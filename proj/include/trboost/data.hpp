#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "trboost/matrix.hpp"

namespace trboost {

struct Dataset {
  Matrix features;
  std::vector<double> labels;
  std::vector<std::string> feature_names;  // empty or one per column

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return features.cols(); }

  // Throws Domain unless n >= 1, m >= 1, shapes agree and all entries are finite.
  void validate() const;

  Dataset subset(std::span<const std::size_t> indices) const;
};

// Label column given by header name or zero-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

// Comma-separated, optional header, RFC-4180 quoting. Every cell must be a
// finite decimal number; errors name the offending row and column.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                 bool has_header = true);

// Every column is a feature; used for scoring files without labels.
Matrix load_feature_matrix(const std::filesystem::path& path, bool has_header = true);

// Writes features then the label column "y" with shortest round-trip decimals.
void write_csv(const Dataset& data, std::ostream& out, const std::string& label_name = "y");
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_name = "y");

std::string format_double(double value);

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Seeded shuffle, then test = round(n * test_fraction) rows and
// val = round(rest * val_fraction) rows; the remainder trains.
SplitIndices split_indices(std::size_t n, double test_fraction, double val_fraction,
                           std::uint64_t seed);
Split split(const Dataset& data, double test_fraction, double val_fraction, std::uint64_t seed);

// Two unit-variance Gaussian blobs centred at +/- separation/2 on every axis.
Dataset gen_two_gaussians(std::size_t n, std::size_t dims, double separation,
                          std::uint64_t seed);

// y = w . x + noise. The weight vector depends only on dims, so datasets
// drawn with different seeds share the same ground truth.
Dataset gen_noisy_regression(std::size_t n, std::size_t dims, double outlier_fraction,
                             double outlier_scale, std::uint64_t seed);

// Shifts round(n * fraction) seeded rows by +/- scale * std(y).
void inject_outliers(Dataset& data, double fraction, double scale, std::uint64_t seed);

}  // namespace trboost
