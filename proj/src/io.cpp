#include "vtest/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vtest/error.hpp"

namespace vtest {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(path + ": cannot open file");
  }
  return in;
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',' || c == '\t' || c == ' ' || c == '\r') {
      if (!current.empty()) {
        fields.push_back(std::move(current));
        current.clear();
      }
      // consecutive separators collapse; a comma-separated empty cell is
      // caught as a column-count mismatch
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) fields.push_back(std::move(current));
  return fields;
}

double parse_cell(const std::string& field, const std::string& path, std::int64_t line,
                  std::int64_t column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
    throw ValidationError(path + ":" + std::to_string(line) + ": column " +
                          std::to_string(column) + ": cannot parse '" + field +
                          "' as a finite number");
  }
  return value;
}

}  // namespace

NumericMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t expected_cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.empty()) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": no data columns");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_cell(fields[c], path, line_no, static_cast<std::int64_t>(c + 1));
      if (format == MatrixFormat::genotype_dosage && v != 0.0 && v != 1.0 && v != 2.0) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": column " +
                              std::to_string(c + 1) + ": dosage value must be 0, 1 or 2");
      }
      row.push_back(v);
    }
    if (expected_cols < 0) {
      expected_cols = static_cast<std::int64_t>(row.size());
    } else if (static_cast<std::int64_t>(row.size()) != expected_cols) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": ragged row: got " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(expected_cols));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ValidationError(path + ": no rows");
  }
  NumericMatrix m(static_cast<std::int64_t>(rows.size()), expected_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::int64_t j = 0; j < expected_cols; ++j) {
      m.at(static_cast<std::int64_t>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_matrix(const std::string& path, const NumericMatrix& m, char delim) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out.precision(17);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    for (std::int64_t j = 0; j < m.n_cols; ++j) {
      if (j) out << delim;
      out << m.at(i, j);
    }
    out << '\n';
  }
}

void write_matrix(const std::string& path, const BinaryMatrix& m, char delim) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    for (std::int64_t j = 0; j < m.n_cols; ++j) {
      if (j) out << delim;
      out << (m.get(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

BlockPartition load_block_partition(const std::string& path, std::int64_t n_features) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::int32_t> ids(static_cast<std::size_t>(n_features), -1);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    std::int64_t feature = -1;
    std::int64_t block = -1;
    if (!(fields >> feature >> block)) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected two integer columns (feature_index block_id)");
    }
    if (feature < 0 || feature >= n_features) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": feature index " +
                            std::to_string(feature) + " out of range [0," +
                            std::to_string(n_features) + ")");
    }
    if (ids[static_cast<std::size_t>(feature)] != -1) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": feature " +
                            std::to_string(feature) + " assigned twice");
    }
    if (block < 0) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": negative block id");
    }
    ids[static_cast<std::size_t>(feature)] = static_cast<std::int32_t>(block);
  }
  for (std::int64_t p = 0; p < n_features; ++p) {
    if (ids[static_cast<std::size_t>(p)] == -1) {
      throw ValidationError(path + ": feature " + std::to_string(p) + " unassigned");
    }
  }
  return BlockPartition::from_assignment(std::move(ids));
}

void write_block_partition(const std::string& path, const BlockPartition& part) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  for (std::int64_t p = 0; p < part.n_features(); ++p) {
    out << p << '\t' << part.assignment[static_cast<std::size_t>(p)] << '\n';
  }
}

DistanceMatrix load_distance_matrix(const std::string& path, std::int64_t expected_n) {
  const NumericMatrix raw = load_matrix(path);
  if (raw.n_rows != raw.n_cols) {
    throw ValidationError(path + ": distance matrix must be square, got " +
                          std::to_string(raw.n_rows) + "x" + std::to_string(raw.n_cols));
  }
  if (expected_n >= 0 && raw.n_rows != expected_n) {
    throw ValidationError(path + ": expected " + std::to_string(expected_n) +
                          " observations, got " + std::to_string(raw.n_rows));
  }
  DistanceMatrix d(raw.n_rows);
  d.d = raw.values;
  validate_distance_matrix(d, path);
  return d;
}

void write_distance_matrix(const std::string& path, const DistanceMatrix& d, char delim) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out.precision(17);
  for (std::int64_t i = 0; i < d.n; ++i) {
    for (std::int64_t j = 0; j < d.n; ++j) {
      if (j) out << delim;
      out << d.at(i, j);
    }
    out << '\n';
  }
}

BlockDistanceSet load_block_distance_set(const std::string& manifest_path,
                                         std::int64_t expected_n) {
  std::ifstream in = open_or_throw(manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();
  std::vector<std::string> paths;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::filesystem::path p(line);
    if (p.is_relative()) p = base / p;
    paths.push_back(p.string());
  }
  if (paths.empty()) {
    throw ValidationError(manifest_path + ": manifest lists no distance matrices");
  }
  return load_block_distance_set(paths, expected_n);
}

BlockDistanceSet load_block_distance_set(const std::vector<std::string>& paths,
                                         std::int64_t expected_n) {
  BlockDistanceSet set;
  for (const auto& path : paths) {
    DistanceMatrix d = load_distance_matrix(path, set.blocks.empty() ? expected_n : set.n);
    if (set.blocks.empty()) set.n = d.n;
    set.blocks.push_back(std::move(d));
    set.block_sizes.push_back(0);  // feature counts unknown for external distances
  }
  return set;
}

void write_block_distance_set(const std::string& manifest_path,
                              const std::string& matrix_prefix,
                              const BlockDistanceSet& set) {
  std::ofstream manifest(manifest_path);
  if (!manifest) throw ValidationError(manifest_path + ": cannot open file for writing");
  for (std::int64_t b = 0; b < set.n_blocks(); ++b) {
    const std::string path = matrix_prefix + std::to_string(b) + ".tsv";
    write_distance_matrix(path, set.blocks[static_cast<std::size_t>(b)]);
    manifest << path << '\n';
  }
}

}  // namespace vtest
