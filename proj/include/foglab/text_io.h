/*
 * Copyright 2026 The FogLab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FOGLAB_TEXT_IO_H_
#define FOGLAB_TEXT_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace foglab {

// Shortest decimal text that parses back to the identical double.
std::string FormatDouble(double value);

// Fixed-point text with `decimals` digits after the point.
std::string FormatFixed(double value, int decimals);

// Parses the whole of `text` (surrounding blanks allowed) as a double.
std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInt(std::string_view text);

std::string_view Trim(std::string_view text);

// Splits one comma-separated line. Quotes are not interpreted: the inputs are
// numeric sensor exports.
std::vector<std::string_view> SplitFields(std::string_view line,
                                          char delimiter = ',');

// Whitespace-separated token reader for the versioned model text formats.
// Malformed input raises a kParse error prefixed with `context`.
class TokenReader {
 public:
  TokenReader(std::string_view text, std::string context)
      : text_(text), context_(std::move(context)) {}

  std::string_view Next();
  bool AtEnd();
  void Expect(std::string_view word);
  std::size_t Size();
  long long Int();
  double Real();
  // Reads a "key=value" token and returns the value text.
  std::string_view Attribute(std::string_view key);
  std::size_t SizeAttribute(std::string_view key);
  double RealAttribute(std::string_view key);

  [[noreturn]] void Malformed(const std::string& what) const;

 private:
  std::string_view text_;
  std::string context_;
  std::size_t pos_ = 0;
};

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace foglab

#endif  // FOGLAB_TEXT_IO_H_
