#include "svshrink/blocks.hpp"

#include <cmath>
#include <stdexcept>

namespace svshrink {

namespace {

// floor with a relative upward nudge: 1/0.05^2 evaluates to 399.999...94 in
// binary, but the definition clearly intends 400.
std::size_t nudged_floor(double x) {
  return static_cast<std::size_t>(std::floor(x * (1.0 + 1e-12)));
}

}  // namespace

bool BlockPartition::valid() const {
  if (bounds.size() < 2 || bounds.front() != 0 || bounds.back() != n) return false;
  for (std::size_t j = 1; j < bounds.size(); ++j)
    if (bounds[j] <= bounds[j - 1]) return false;
  return true;
}

BlockPartition weakly_geometric(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::domain_error("weakly_geometric: eps must lie in (0, 1)");
  const double rho = 1.0 / std::log(1.0 / eps);
  const double inv_eps2 = 1.0 / (eps * eps);
  const std::size_t n = nudged_floor(inv_eps2);

  BlockPartition part;
  part.n = n;
  part.bounds.push_back(0);
  for (std::size_t j = 1;; ++j) {
    const double raw = std::pow(1.0 + rho, static_cast<double>(j)) / rho;
    const bool final_block = raw * (1.0 + 1e-12) >= inv_eps2;
    const std::size_t l = final_block ? n : std::min(n, nudged_floor(raw));
    if (l > part.bounds.back()) part.bounds.push_back(l);
    if (final_block || part.bounds.back() == n) break;
    if (j > 1000000)
      throw std::runtime_error("weakly_geometric: bound iteration did not terminate");
  }
  return part;
}

PartitionDiagnostics validate(const BlockPartition& part) {
  PartitionDiagnostics diag;
  if (part.bounds.size() < 2) {
    diag.strictly_increasing = false;
    diag.notes.push_back("fewer than two bounds");
    return diag;
  }
  if (part.bounds.front() != 0) {
    diag.strictly_increasing = false;
    diag.notes.push_back("first bound is not 0");
  }
  if (part.bounds.back() != part.n)
    diag.notes.push_back("last bound does not equal N");
  for (std::size_t j = 1; j < part.bounds.size(); ++j) {
    if (part.bounds[j] <= part.bounds[j - 1]) {
      diag.strictly_increasing = false;
      diag.notes.push_back("bounds not strictly increasing at position " +
                           std::to_string(j));
      continue;
    }
    diag.sizes.push_back(part.bounds[j] - part.bounds[j - 1]);
  }
  if (!diag.sizes.empty()) diag.first_block_size = diag.sizes.front();
  for (std::size_t j = 1; j < diag.sizes.size(); ++j) {
    const double r = static_cast<double>(diag.sizes[j]) /
                     static_cast<double>(diag.sizes[j - 1]);
    diag.ratios.push_back(r);
    diag.max_ratio = std::max(diag.max_ratio, r);
  }
  return diag;
}

}  // namespace svshrink
