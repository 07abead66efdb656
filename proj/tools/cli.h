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

// The btow command line: solve, simulate, cec-check, converge, residual and
// gen-space. Exit codes: 0 success, 1 invalid input, 2 solver did not
// converge, 3 a checked property failed.

#ifndef BTOW_TOOLS_CLI_H_
#define BTOW_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace btow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitPropertyFailed = 3;

// Artifact schema version, written into every JSON and CSV output.
inline constexpr int kSchemaVersion = 1;

// args excludes the program name. Artifacts written to "-" go to out.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace btow::cli

#endif  // BTOW_TOOLS_CLI_H_
