#include "polylab/polytope.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace polylab {

namespace {

Polytope from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("vertices")) {
    throw Error(ErrorKind::ParseError, "polytope JSON needs \"dim\" and \"vertices\"");
  }
  const int d = doc.at("dim").get<int>();
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::ParseError, "unsupported dimension");
  PointList pts;
  for (const auto& row : doc.at("vertices")) {
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      throw Error(ErrorKind::ParseError, "vertex " + std::to_string(pts.size()) +
                                             " does not have " + std::to_string(d) +
                                             " coordinates");
    }
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = row[j].get<double>();
    pts.push_back(v);
  }
  return build_from_vertices(pts);
}

}  // namespace

Polytope parse_polytope_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos && spec.find('{') == std::string::npos) {
    const std::string name = spec.substr(0, colon);
    int d = 0;
    try {
      std::size_t used = 0;
      d = std::stoi(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad dimension in polytope spec '" + spec + "'");
    }
    if (d < 2 || d > kMaxDim) throw Error(ErrorKind::ParseError, "unsupported dimension");
    if (name == "cube") return make_cube(d);
    if (name == "simplex") return make_simplex(d);
    if (name == "cross-polytope") return make_cross_polytope(d);
    throw Error(ErrorKind::ParseError, "unknown built-in polytope '" + name + "'");
  }
  nlohmann::json doc;
  try {
    if (!spec.empty() && spec.front() == '{') {
      doc = nlohmann::json::parse(spec);
    } else {
      std::ifstream in(spec);
      if (!in) throw Error(ErrorKind::ParseError, "cannot open polytope file '" + spec + "'");
      doc = nlohmann::json::parse(in);
    }
    return from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace polylab
