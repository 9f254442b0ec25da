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

#ifndef KERNELGEN_FORMAT_HPP
#define KERNELGEN_FORMAT_HPP

#include <string>

namespace kernelgen {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_shortest(double value);

/// printf-style %.17g; used wherever output must carry 17 significant digits.
std::string format_17g(double value);

}  // namespace kernelgen

#endif  // KERNELGEN_FORMAT_HPP
