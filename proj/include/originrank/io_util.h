// Copyright 2026 The OriginRank Authors.
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

#ifndef ORIGINRANK_IO_UTIL_H_
#define ORIGINRANK_IO_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace originrank {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// 64-bit FNV-1a digest, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Splits one CSV line on commas. Fields are never quoted in our formats.
std::vector<std::string> split_csv_line(std::string_view line);

std::string join_doubles(std::span<const double> values, char sep = ',');

}  // namespace originrank

#endif  // ORIGINRANK_IO_UTIL_H_
