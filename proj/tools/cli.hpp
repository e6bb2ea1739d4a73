// Copyright 2026 The fdpaudit Authors
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

#ifndef FDP_TOOLS_CLI_HPP_
#define FDP_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace fdp::cli {

// Exit codes: 0 success, 2 validation error, 3 numerical error,
// 4 audit-infrastructure failure. The verdict of an audit is data, not an
// error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitAuditInfra = 4;

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace fdp::cli

#endif  // FDP_TOOLS_CLI_HPP_
