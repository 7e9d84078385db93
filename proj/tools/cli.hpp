// Copyright 2026 The vgskit Authors
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

// The vgskit command line. Run() is the whole program minus process setup,
// so tests can drive it in-process.

#ifndef VGSKIT_TOOLS_CLI_HPP_
#define VGSKIT_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace vgs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vgs::cli

#endif  // VGSKIT_TOOLS_CLI_HPP_
