// Copyright 2026 The Truecase Authors.
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

#ifndef TRUECASE_UNICODE_H_
#define TRUECASE_UNICODE_H_

#include <string>
#include <string_view>

namespace truecase {

// Decodes UTF-8 into code points. Malformed sequences decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view text);
void AppendUtf8(char32_t c, std::string* out);

// Simple (one-to-one) Unicode case mappings.
char32_t ToLower(char32_t c);
char32_t ToUpper(char32_t c);
// Uppercase or titlecase letter, i.e. a letter with a distinct simple
// lowercase mapping.
bool IsCasedUpper(char32_t c);
bool IsAlphabetic(char32_t c);

std::u32string ToLower(std::u32string_view text);

}  // namespace truecase

#endif  // TRUECASE_UNICODE_H_
