// Copyright 2026 The sqattack Authors
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

#ifndef SQATTACK_HARNESS_CLI_H_
#define SQATTACK_HARNESS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace sqattack::harness {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // unknown flags, bad values
inline constexpr int kExitConfig = 2;    // malformed or infeasible config
inline constexpr int kExitProtocol = 3;  // oracle violation, replay mismatch

// args excludes the program name.
int CliRun(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);
int CliRun(int argc, char** argv);

}  // namespace sqattack::harness

#endif  // SQATTACK_HARNESS_CLI_H_
