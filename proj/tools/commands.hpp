// Copyright 2026 The nbuplift Authors.
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

#ifndef NBUPLIFT_TOOLS_COMMANDS_HPP_
#define NBUPLIFT_TOOLS_COMMANDS_HPP_

namespace nbuplift::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSchema = 2,
  kExitConfig = 3,
  kExitEstimation = 4,
  kExitInternal = 5,
};

// Parses and runs one command line; returns the process exit code.
// Diagnostics go to stderr, summaries to stdout.
int Main(int argc, const char* const* argv);

}  // namespace nbuplift::cli

#endif  // NBUPLIFT_TOOLS_COMMANDS_HPP_
