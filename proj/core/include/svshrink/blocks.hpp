#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace svshrink {

/// Partition of {1,...,N} into consecutive blocks B_j = {l_{j-1}+1,...,l_j}
/// given by strictly increasing bounds 0 = l_0 < l_1 < ... < l_J = N.
struct BlockPartition {
  std::size_t n = 0;                 // N, last index covered
  std::vector<std::size_t> bounds;   // l_0..l_J

  std::size_t block_count() const { return bounds.empty() ? 0 : bounds.size() - 1; }
  std::size_t block_size(std::size_t j) const { return bounds[j + 1] - bounds[j]; }
  /// First index of block j (1-based sequence index).
  std::size_t block_begin(std::size_t j) const { return bounds[j] + 1; }
  /// Last index of block j (inclusive).
  std::size_t block_end(std::size_t j) const { return bounds[j + 1]; }

  bool valid() const;
};

/// Weakly geometric blocks: N = floor(1/eps^2), rho = 1/log(1/eps),
/// l_j = floor((1+rho)^j / rho), stopping at the first j with
/// (1+rho)^j / rho >= 1/eps^2; the last bound is clamped to N and duplicate
/// bounds are merged. Floors are evaluated with a relative nudge of 1e-12 so
/// that values which are integers up to floating-point noise (e.g. 1/0.05^2)
/// floor to the intended integer.
BlockPartition weakly_geometric(double eps);

/// Diagnostic summary of a partition (no exceptions; `notes` lists problems).
struct PartitionDiagnostics {
  std::vector<std::size_t> sizes;   // |B_1|..|B_J|
  std::vector<double> ratios;       // |B_{j+1}| / |B_j|
  std::size_t first_block_size = 0;
  double max_ratio = 0.0;           // 0 when J = 1
  bool strictly_increasing = true;  // bounds strictly increasing and start at 0
  std::vector<std::string> notes;
};

PartitionDiagnostics validate(const BlockPartition& part);

}  // namespace svshrink
