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

#include "foglab/text_io.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "foglab/error.h"

namespace foglab {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kSpec: return "spec error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kAggregation: return "aggregation error";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kRuntime: return "runtime error";
  }
  return "error";
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string FormatFixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string_view Trim(std::string_view text) {
  const char* blanks = " \t\r\n";
  const auto first = text.find_first_not_of(blanks);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(blanks);
  return text.substr(first, last - first + 1);
}

std::optional<double> ParseDouble(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> ParseInt(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> SplitFields(std::string_view line,
                                          char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view TokenReader::Next() {
  if (AtEnd()) Malformed("unexpected end of input");
  const std::size_t start = pos_;
  while (pos_ < text_.size() &&
         !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
    ++pos_;
  }
  return text_.substr(start, pos_ - start);
}

bool TokenReader::AtEnd() {
  while (pos_ < text_.size() &&
         std::isspace(static_cast<unsigned char>(text_[pos_]))) {
    ++pos_;
  }
  return pos_ >= text_.size();
}

void TokenReader::Expect(std::string_view word) {
  const auto token = Next();
  if (token != word) {
    Malformed("expected '" + std::string(word) + "', got '" +
              std::string(token) + "'");
  }
}

std::size_t TokenReader::Size() {
  const auto value = Int();
  if (value < 0) Malformed("expected a non-negative count");
  return static_cast<std::size_t>(value);
}

long long TokenReader::Int() {
  const auto token = Next();
  const auto value = ParseInt(token);
  if (!value) Malformed("expected an integer, got '" + std::string(token) + "'");
  return *value;
}

double TokenReader::Real() {
  const auto token = Next();
  const auto value = ParseDouble(token);
  if (!value) Malformed("expected a number, got '" + std::string(token) + "'");
  return *value;
}

std::string_view TokenReader::Attribute(std::string_view key) {
  const auto token = Next();
  if (!token.starts_with(key) || token.size() <= key.size() ||
      token[key.size()] != '=') {
    Malformed("expected attribute '" + std::string(key) + "', got '" +
              std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

std::size_t TokenReader::SizeAttribute(std::string_view key) {
  const auto value = ParseInt(Attribute(key));
  if (!value || *value < 0) Malformed("bad value for " + std::string(key));
  return static_cast<std::size_t>(*value);
}

double TokenReader::RealAttribute(std::string_view key) {
  const auto value = ParseDouble(Attribute(key));
  if (!value) Malformed("bad value for " + std::string(key));
  return *value;
}

void TokenReader::Malformed(const std::string& what) const {
  Fail(ErrorKind::kParse, context_ + ": " + what);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kRuntime, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kRuntime, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) Fail(ErrorKind::kRuntime, "short write to " + path.string());
}

}  // namespace foglab
