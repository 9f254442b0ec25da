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

#ifndef KERNELGEN_INGEST_HPP
#define KERNELGEN_INGEST_HPP

#include <iosfwd>
#include <string>

#include "kernelgen/dataset.hpp"
#include "kernelgen/run_config.hpp"

namespace kernelgen {

/// Reads the configured time and value columns from CSV text with a header
/// row and applies the split as a trailing test suffix. Times are plain
/// numbers or ISO-8601 dates (YYYY-MM-DD, optionally Thh:mm[:ss[.fff]][Z]);
/// dates become fractional day offsets from the first row. Throws IngestError
/// naming the row and column on any bad cell, on missing columns, on times
/// that do not strictly increase, and when fewer than five training rows
/// remain. Row numbers count the header as row 1.
TimeSeriesDataset ingest(std::istream& csv, const RunConfig& config);
TimeSeriesDataset ingest(const RunConfig& config);  // reads config.input

}  // namespace kernelgen

#endif  // KERNELGEN_INGEST_HPP
