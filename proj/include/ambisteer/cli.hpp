// Copyright 2025 The Ambisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace ambisteer {

/// Exit codes of the command-line surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitInternalError = 4;

/// Entry point for the `ambisteer` tool (simulate | run | eval). Exposed so
/// tests can drive the CLI in-process.
int run_cli(int argc, const char* const* argv);

}  // namespace ambisteer
