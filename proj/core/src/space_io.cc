// Copyright 2026 The btow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "btow/space_io.h"

#include <fstream>
#include <sstream>

#include "btow/error.h"
#include "json.hpp"

namespace btow {

using nlohmann::json;

std::string write_space_json(const DiscretizedSpace& space,
                             std::string_view config_json) {
  json doc;
  doc["format_version"] = kSpaceFormatVersion;
  if (!config_json.empty()) doc["config"] = json::parse(config_json);
  json vertices = json::array();
  for (int v = 0; v < space.size(); ++v) {
    json item{{"id", v}};
    if (space.has_coords()) {
      auto c = space.coord(v);
      item["coords"] = std::vector<double>(c.begin(), c.end());
    }
    vertices.push_back(std::move(item));
  }
  doc["vertices"] = std::move(vertices);
  json edges = json::array();
  for (const Edge& e : space.edges()) edges.push_back({e.a, e.b, e.length});
  doc["edges"] = std::move(edges);
  json boundary = json::array();
  const BoundaryData& b = space.boundary();
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    boundary.push_back({{"id", b.vertices[i]}, {"F", b.values[i]}});
  }
  doc["boundary"] = std::move(boundary);
  return doc.dump();
}

DiscretizedSpace parse_space_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("space file is not valid JSON: ") +
                          e.what());
  }
  if (!doc.is_object()) throw ValidationError("space file must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "vertices" && key != "edges" && key != "boundary" &&
        key != "format_version" && key != "config") {
      throw ValidationError("unknown key in space file: " + key);
    }
  }
  if (doc.contains("format_version") &&
      doc["format_version"] != kSpaceFormatVersion) {
    throw ValidationError("unsupported space format_version " +
                          doc["format_version"].dump());
  }
  for (const char* key : {"vertices", "edges", "boundary"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ValidationError(std::string("space file needs an array \"") + key +
                            "\"");
    }
  }
  try {
    const json& vs = doc["vertices"];
    const int n = static_cast<int>(vs.size());
    std::vector<int> seen(n, 0);
    int dim = -1;
    std::vector<double> coords;
    for (const json& item : vs) {
      int id = item.at("id").get<int>();
      if (id < 0 || id >= n || seen[id]) {
        throw ValidationError("vertex ids must be a permutation of 0..N-1; bad id " +
                              std::to_string(id));
      }
      seen[id] = 1;
      int d = item.contains("coords") ? static_cast<int>(item["coords"].size()) : 0;
      if (dim < 0) {
        dim = d;
        coords.assign(static_cast<std::size_t>(n) * dim, 0.0);
      } else if (d != dim) {
        throw ValidationError("vertex " + std::to_string(id) +
                              " has coords of a different dimension");
      }
      for (int k = 0; k < d; ++k) {
        coords[static_cast<std::size_t>(id) * dim + k] =
            item["coords"][k].get<double>();
      }
    }
    std::vector<Edge> edges;
    for (const json& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 3) {
        throw ValidationError("edges must be [i, j, length] triples");
      }
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    std::vector<std::pair<int, double>> boundary;
    for (const json& b : doc["boundary"]) {
      boundary.emplace_back(b.at("id").get<int>(), b.at("F").get<double>());
    }
    return DiscretizedSpace(n, std::move(edges), std::move(boundary),
                            std::move(coords), std::max(dim, 0));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed space file: ") + e.what());
  }
}

DiscretizedSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open space file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_space_json(buf.str());
}

void save_space(const std::string& path, const DiscretizedSpace& space,
                std::string_view config_json) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write space file " + path);
  out << write_space_json(space, config_json) << "\n";
}

}  // namespace btow
