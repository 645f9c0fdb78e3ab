// Copyright 2026 The Duofuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DUOFUZZ_TEMPLATE_H_
#define DUOFUZZ_TEMPLATE_H_

#include <map>
#include <string>
#include <string_view>

namespace duofuzz {

// Replaces {name} with values.at(name) in a single pass. Braces that do not
// form a known placeholder are copied verbatim and substituted text is never
// rescanned, so values may contain braces.
std::string FillTemplate(std::string_view tmpl,
                         const std::map<std::string, std::string>& values);

}  // namespace duofuzz

#endif  // DUOFUZZ_TEMPLATE_H_
