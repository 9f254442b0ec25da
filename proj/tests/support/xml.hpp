/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KERNELGEN_TESTS_SUPPORT_XML_HPP
#define KERNELGEN_TESTS_SUPPORT_XML_HPP

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kernelgen::testing {

/// Minimal well-formedness check for generated XML: one root, balanced and
/// properly nested tags, quoted attribute values, no stray '<' or '&'.
/// Returns element counts by name; throws std::runtime_error when malformed.
inline std::map<std::string, int> xml_element_counts(const std::string& s) {
  std::map<std::string, int> counts;
  std::vector<std::string> open;
  int roots = 0;
  std::size_t i = 0;
  auto bad = [&](const std::string& why) {
    throw std::runtime_error("malformed XML at offset " + std::to_string(i) + ": " + why);
  };
  auto name_at = [&](std::size_t& p) {
    const std::size_t b = p;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '-' ||
                            s[p] == ':' || s[p] == '_'))
      ++p;
    if (p == b) bad("expected a name");
    return s.substr(b, p - b);
  };
  while (i < s.size()) {
    if (s[i] == '&') {
      const auto semi = s.find(';', i);
      if (semi == std::string::npos || semi - i > 8) bad("bare '&'");
      i = semi + 1;
    } else if (s.compare(i, 2, "<?") == 0) {
      const auto end = s.find("?>", i);
      if (end == std::string::npos) bad("unterminated declaration");
      i = end + 2;
    } else if (s.compare(i, 2, "</") == 0) {
      i += 2;
      const auto name = name_at(i);
      if (open.empty() || open.back() != name) bad("mismatched </" + name + ">");
      open.pop_back();
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] != '>') bad("expected '>'");
      ++i;
    } else if (s[i] == '<') {
      ++i;
      const auto name = name_at(i);
      if (open.empty() && ++roots > 1) bad("second root element");
      ++counts[name];
      for (;;) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) bad("unterminated tag");
        if (s.compare(i, 2, "/>") == 0) {
          i += 2;
          break;
        }
        if (s[i] == '>') {
          ++i;
          open.push_back(name);
          break;
        }
        name_at(i);
        if (i >= s.size() || s[i] != '=') bad("attribute without value");
        ++i;
        if (i >= s.size() || s[i] != '"') bad("unquoted attribute");
        const auto close = s.find('"', i + 1);
        if (close == std::string::npos) bad("unterminated attribute");
        if (s.find('<', i + 1) < close) bad("'<' inside attribute");
        i = close + 1;
      }
    } else {
      if (open.empty() && !std::isspace(static_cast<unsigned char>(s[i]))) bad("text outside root");
      ++i;
    }
  }
  if (!open.empty()) bad("unclosed <" + open.back() + ">");
  if (roots != 1) bad("no root element");
  return counts;
}

}  // namespace kernelgen::testing

#endif  // KERNELGEN_TESTS_SUPPORT_XML_HPP
