// Copyright 2026 The RLLF Authors.
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

#ifndef RLLF_PARSER_H_
#define RLLF_PARSER_H_

#include <string_view>

#include "rllf/term.h"

namespace rllf {

// Grammar:
//   program  := clause*
//   clause   := atom "." | atom ":-" literal ("," literal)* "."
//   literal  := "\+" atom | atom
//   atom     := lower_ident | lower_ident "(" term ("," term)* ")"
//   term     := VAR | atom
// Variables match [A-Z_][A-Za-z0-9_]*, constants and functors match
// [a-z][A-Za-z0-9_]*. '%' starts a comment running to end of line.
//
// Both entry points throw SyntaxError with a 1-based line and column.
Program ParseProgram(std::string_view text);

// A single atom with an optional trailing period.
Term ParseQuery(std::string_view text);

}  // namespace rllf

#endif  // RLLF_PARSER_H_
