#pragma once

#include <string>
#include <vector>

#include "vtest/block.hpp"
#include "vtest/distance.hpp"
#include "vtest/matrix.hpp"

namespace vtest {

enum class MatrixFormat { delimited, genotype_dosage };

/// Reads a delimited text matrix (comma, tab or space separated; lines
/// starting with '#' are skipped). genotype_dosage additionally requires
/// every entry to be 0, 1 or 2. Errors name file, line and column.
NumericMatrix load_matrix(const std::string& path,
                          MatrixFormat format = MatrixFormat::delimited);

void write_matrix(const std::string& path, const NumericMatrix& m, char delim = '\t');
void write_matrix(const std::string& path, const BinaryMatrix& m, char delim = '\t');

/// Two whitespace-separated integer columns (feature_index block_id), 0-based,
/// exactly one line per feature. Block ids are relabeled to 0..B-1.
BlockPartition load_block_partition(const std::string& path, std::int64_t n_features);

void write_block_partition(const std::string& path, const BlockPartition& part);

/// Symmetric N x N non-negative matrix with zero diagonal. Asymmetry beyond
/// 1e-9, negative entries and nonzero diagonals are validation errors.
DistanceMatrix load_distance_matrix(const std::string& path,
                                    std::int64_t expected_n = -1);

void write_distance_matrix(const std::string& path, const DistanceMatrix& d,
                           char delim = '\t');

/// Manifest file: one distance-matrix path per line, in block order. Relative
/// paths resolve against the manifest's directory.
BlockDistanceSet load_block_distance_set(const std::string& manifest_path,
                                         std::int64_t expected_n = -1);

BlockDistanceSet load_block_distance_set(const std::vector<std::string>& paths,
                                         std::int64_t expected_n = -1);

void write_block_distance_set(const std::string& manifest_path,
                              const std::string& matrix_prefix,
                              const BlockDistanceSet& set);

}  // namespace vtest
