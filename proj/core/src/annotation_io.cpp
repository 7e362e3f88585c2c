#include "ctmap/annotation_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace ctmap {
namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "annotation line " + std::to_string(line) + ": " + what);
}

json polygon_json(const Polygon& poly) {
  json pts = json::array();
  for (const auto& p : poly.vertices) pts.push_back({p.x, p.y});
  return pts;
}

}  // namespace

std::vector<TextAnnotation> parse_annotations(std::istream& in) {
  std::vector<TextAnnotation> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(line_no, e.what());
    }
    if (!obj.is_object()) fail(line_no, "expected a JSON object");
    const auto poly = obj.find("polygon");
    if (poly == obj.end() || !poly->is_array()) fail(line_no, "missing \"polygon\" array");

    TextAnnotation ann;
    for (const auto& pt : *poly) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        fail(line_no, "polygon points must be [x, y] number pairs");
      }
      const Point p{pt[0].get<double>(), pt[1].get<double>()};
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(line_no, "non-finite coordinate");
      ann.polygon.vertices.push_back(p);
    }
    if (ann.polygon.vertices.size() < 3) fail(line_no, "polygon needs at least 3 points");

    if (const auto text = obj.find("text"); text != obj.end() && !text->is_null()) {
      if (!text->is_string()) fail(line_no, "\"text\" must be a string or null");
      ann.text = text->get<std::string>();
    }
    if (const auto ignore = obj.find("ignore"); ignore != obj.end()) {
      if (!ignore->is_boolean()) fail(line_no, "\"ignore\" must be a boolean");
      ann.ignore = ignore->get<bool>();
    }
    ann.id = static_cast<int>(out.size());
    out.push_back(std::move(ann));
  }
  return out;
}

std::vector<TextAnnotation> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_annotations(in);
}

std::string annotation_to_json_line(const TextAnnotation& ann) {
  json obj;
  obj["polygon"] = polygon_json(ann.polygon);
  obj["text"] = ann.text ? json(*ann.text) : json(nullptr);
  obj["ignore"] = ann.ignore;
  return obj.dump();
}

void write_annotations(std::ostream& out, const std::vector<TextAnnotation>& anns) {
  for (const auto& a : anns) out << annotation_to_json_line(a) << '\n';
}

void write_annotations(const std::filesystem::path& path, const std::vector<TextAnnotation>& anns) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  write_annotations(out, anns);
}

std::string detection_to_json_line(const DecodedInstance& inst) {
  json obj;
  obj["polygon"] = polygon_json(inst.contour);
  obj["text"] = nullptr;
  obj["ignore"] = false;
  obj["score"] = inst.score;
  if (inst.proposal) {
    const auto& r = inst.proposal->rect;
    obj["rect"] = {{"center", {r.center.x, r.center.y}}, {"size", {r.width, r.height}}, {"angle", r.angle}};
  }
  return obj.dump();
}

}  // namespace ctmap
