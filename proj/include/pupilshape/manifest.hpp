#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pupilshape/error.hpp"
#include "pupilshape/eval.hpp"

namespace pupilshape {

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

struct ManifestEntry {
  std::string face_id;
  Label label = Label::Unknown;
  /// Empty means the eye is missing. Stored as written in the file.
  std::string left_path;
  std::string right_path;
};

struct Manifest {
  /// Relative paths in entries resolve against this directory.
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::string resolve(const std::string& p) const {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base_dir / path).string();
  }
};

namespace detail {

// Comma-separated fields with optional double quoting ("" escapes a quote).
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline Manifest parse_manifest(std::istream& in, std::filesystem::path base_dir) {
  Manifest manifest;
  manifest.base_dir = std::move(base_dir);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ManifestError, "manifest is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = detail::split_csv_line(line);
  constexpr std::array<std::string_view, 4> kColumns = {"face_id", "label", "left_path", "right_path"};
  std::array<std::size_t, 4> col{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw Error(ErrorCode::ManifestError, "manifest header lacks column '" + std::string(kColumns[c]) + "'");
    }
    col[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ManifestError, "manifest line " + std::to_string(line_no) + " has " +
                                                std::to_string(fields.size()) + " fields, expected " +
                                                std::to_string(header.size()));
    }
    ManifestEntry e;
    e.face_id = fields[col[0]];
    e.label = parse_label(fields[col[1]]);
    e.left_path = fields[col[2]];
    e.right_path = fields[col[3]];
    if (e.face_id.empty()) {
      throw Error(ErrorCode::ManifestError, "manifest line " + std::to_string(line_no) + " has no face_id");
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

inline Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path);
  return parse_manifest(in, std::filesystem::path(path).parent_path());
}

inline std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::ostringstream out;
  out << "face_id,label,left_path,right_path\n";
  for (const ManifestEntry& e : entries) {
    out << detail::csv_field(e.face_id) << ',' << to_string(e.label) << ',' << detail::csv_field(e.left_path)
        << ',' << detail::csv_field(e.right_path) << '\n';
  }
  return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace pupilshape
