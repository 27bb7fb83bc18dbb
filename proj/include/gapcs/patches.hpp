#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gapcs/errors.hpp"

namespace gapcs {

/// Start offsets of overlapping patches along one axis: every multiple of
/// stride that fits, plus a final position clamped to the border so the last
/// pixels are always covered.
inline std::vector<int> patch_positions(int extent, int patch_size,
                                        int stride) {
  if (patch_size < 1 || patch_size > extent) {
    throw DomainError("patch_positions: need 1 <= patch_size <= extent");
  }
  if (stride < 1 || stride > patch_size) {
    throw DomainError("patch_positions: need 1 <= stride <= patch_size");
  }
  std::vector<int> positions;
  for (int p = 0; p + patch_size <= extent; p += stride) positions.push_back(p);
  if (positions.back() != extent - patch_size) {
    positions.push_back(extent - patch_size);
  }
  return positions;
}

struct PatchSet {
  std::vector<Eigen::MatrixXd> patches;
  std::vector<std::pair<int, int>> positions;  // (row, col) of each patch
  int image_rows = 0;
  int image_cols = 0;
  int patch_size = 0;
};

inline PatchSet extract_patches(const Eigen::MatrixXd& image, int patch_size,
                                int stride) {
  const auto rows = static_cast<int>(image.rows());
  const auto cols = static_cast<int>(image.cols());
  const std::vector<int> row_pos = patch_positions(rows, patch_size, stride);
  const std::vector<int> col_pos = patch_positions(cols, patch_size, stride);
  PatchSet set;
  set.image_rows = rows;
  set.image_cols = cols;
  set.patch_size = patch_size;
  set.patches.reserve(row_pos.size() * col_pos.size());
  set.positions.reserve(row_pos.size() * col_pos.size());
  for (const int r : row_pos) {
    for (const int c : col_pos) {
      set.patches.emplace_back(image.block(r, c, patch_size, patch_size));
      set.positions.emplace_back(r, c);
    }
  }
  return set;
}

/// Per-pixel average of overlapping patch contributions. A left inverse of
/// extract_patches.
inline Eigen::MatrixXd aggregate_patches(const PatchSet& set) {
  if (set.patches.size() != set.positions.size()) {
    throw DimensionError("aggregate_patches: patches/positions mismatch");
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(set.image_rows, set.image_cols);
  Eigen::MatrixXd count = Eigen::MatrixXd::Zero(set.image_rows, set.image_cols);
  for (std::size_t i = 0; i < set.patches.size(); ++i) {
    const auto& patch = set.patches[i];
    if (patch.rows() != set.patch_size || patch.cols() != set.patch_size) {
      throw DimensionError("aggregate_patches: patch size mismatch");
    }
    const auto [r, c] = set.positions[i];
    sum.block(r, c, set.patch_size, set.patch_size) += patch;
    count.block(r, c, set.patch_size, set.patch_size) +=
        Eigen::MatrixXd::Ones(set.patch_size, set.patch_size);
  }
  return sum.array() / count.array();
}

}  // namespace gapcs
