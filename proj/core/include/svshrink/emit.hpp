#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace svshrink {

/// FNV-1a 64-bit digest, rendered as 16 lowercase hex digits. Used to stamp
/// output files with a fingerprint of the run configuration.
std::string fnv1a64_hex(std::string_view text);

/// Fixed-point rendering with `decimals` digits after the point ("11.9638").
std::string fmt_fixed(double value, int decimals);

/// Shortest-ish general rendering at 12 significant digits ("0.0687", "2e-05").
std::string fmt_general(double value);

/// Provenance header written as '#' comment lines ahead of the data.
struct TableMeta {
  std::string tool;       // producing command or experiment name
  std::uint64_t seed = 0;
  std::uint64_t reps = 0;  // 0 means not a Monte Carlo table
  std::string config;      // canonical "key=value ..." summary, also digested
};

/// Column-major-agnostic table of pre-rendered cells. Writers own separators
/// and headers; callers own cell formatting via fmt_fixed / fmt_general so
/// that identical inputs give byte-identical files.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Space-separated data file with a bare header line, pgfplots-friendly:
///   # tool: ...
///   # seed: ...
///   x solid dashed
///   0.0000 11.9638 1.9988
std::string render_dat(const TableMeta& meta, const Table& table);

/// Comma-separated variant with the same '#' provenance header.
std::string render_csv(const TableMeta& meta, const Table& table);

/// Write rendered text to a file, replacing any existing content.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace svshrink
