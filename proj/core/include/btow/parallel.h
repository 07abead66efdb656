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

#ifndef BTOW_PARALLEL_H_
#define BTOW_PARALLEL_H_

namespace btow {

// Caps the number of worker threads used by sweeps and playout batches.
// Values < 1 restore the default (all available cores). No-op without OpenMP.
void set_thread_count(int threads);
int thread_count();

}  // namespace btow

#endif  // BTOW_PARALLEL_H_
