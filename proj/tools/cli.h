// Copyright 2026 The Tidy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TIDY_TOOLS_CLI_H_
#define TIDY_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "tidy/error.h"

namespace tidy::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitInfeasible = 3,
  kExitLlm = 4,
};

int exit_code_for(ErrorKind kind);

// Runs one command; `args` excludes the program name, e.g.
// {"render", "--scene", "s.json", "--out", "s.ppm"}. A `--config file.json`
// option supplies defaults for any flag not given on the command line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tidy::cli

#endif  // TIDY_TOOLS_CLI_H_
