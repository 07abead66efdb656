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

// JSON space files:
//   {"format_version": 1,
//    "vertices": [{"id": 0, "coords": [x, y]}, ...],
//    "edges": [[i, j, length], ...],
//    "boundary": [{"id": 3, "F": 0.5}, ...]}
// "coords" is optional per file (all vertices or none). Unknown top-level
// keys other than "format_version" and "config" are rejected.

#ifndef BTOW_SPACE_IO_H_
#define BTOW_SPACE_IO_H_

#include <string>
#include <string_view>

#include "btow/metric_space.h"

namespace btow {

inline constexpr int kSpaceFormatVersion = 1;

// config_json, when non-empty, must be a JSON object and is stored under
// "config" for provenance.
std::string write_space_json(const DiscretizedSpace& space,
                             std::string_view config_json = {});
DiscretizedSpace parse_space_json(std::string_view text);

DiscretizedSpace load_space(const std::string& path);
void save_space(const std::string& path, const DiscretizedSpace& space,
                std::string_view config_json = {});

}  // namespace btow

#endif  // BTOW_SPACE_IO_H_
