#include "svshrink/emit.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace svshrink {

std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string fmt_general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

void append_meta(std::string& out, const TableMeta& meta) {
  out += "# tool: " + meta.tool + "\n";
  out += "# seed: " + std::to_string(meta.seed) + "\n";
  if (meta.reps > 0) out += "# reps: " + std::to_string(meta.reps) + "\n";
  out += "# config: " + meta.config + "\n";
  out += "# config_digest: " + fnv1a64_hex(meta.config) + "\n";
}

std::string render_separated(const TableMeta& meta, const Table& table,
                             char sep) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("render table: ragged row");
    }
  }
  std::string out;
  append_meta(out, meta);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += sep;
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += sep;
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_dat(const TableMeta& meta, const Table& table) {
  return render_separated(meta, table, ' ');
}

std::string render_csv(const TableMeta& meta, const Table& table) {
  return render_separated(meta, table, ',');
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace svshrink
