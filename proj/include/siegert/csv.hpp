/* Copyright 2026 The siegert authors
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

/** @file csv.hpp
 *  @brief Deterministic CSV output: comma separators, '#' comment lines, LF
 *    endings, and floats at 17 significant digits so identical runs produce
 *    byte-identical files.
 */

#ifndef SIEGERT_CSV_HPP
#define SIEGERT_CSV_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "siegert/core.hpp"

namespace siegert::csv {

/** %.17g rendering, locale-independent. */
std::string format(double value);

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path);

    void comment(const std::string& text);
    /** Column names as a '#' comment line. */
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
};

}  // namespace siegert::csv

#endif
