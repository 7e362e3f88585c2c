#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctmap/decoder.hpp"
#include "ctmap/encoder.hpp"

namespace ctmap {

// Line-delimited JSON, one object per line:
//   {"polygon": [[x, y], ...], "text": "..." | null, "ignore": false}
// Blank lines are skipped. Extra keys (e.g. "score") are tolerated. Each
// annotation's id is its 0-based line position among non-blank lines.

std::vector<TextAnnotation> parse_annotations(std::istream& in);
std::vector<TextAnnotation> read_annotations(const std::filesystem::path& path);

std::string annotation_to_json_line(const TextAnnotation& ann);
void write_annotations(std::ostream& out, const std::vector<TextAnnotation>& anns);
void write_annotations(const std::filesystem::path& path, const std::vector<TextAnnotation>& anns);

/// Detection line in annotation format plus "score" and, when present,
/// "rect": {"center": [x, y], "size": [w, h], "angle": deg}.
std::string detection_to_json_line(const DecodedInstance& inst);

}  // namespace ctmap
