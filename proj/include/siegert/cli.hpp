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

/** @file cli.hpp
 *  @brief Command-line front end. Subcommands mirror the library modules;
 *    every run writes CSV outputs plus a manifest that reproduces the run via
 *    --config. Exit codes: 0 success, 2 configuration error, 3 numerical
 *    non-convergence (trace files are still written).
 */

#ifndef SIEGERT_CLI_HPP
#define SIEGERT_CLI_HPP

#include <string>
#include <vector>

namespace siegert::cli {

/** Run the tool on the given arguments (program name excluded). */
int run(const std::vector<std::string>& args);

/** argv-style entry point for main(). */
int run(int argc, char** argv);

}  // namespace siegert::cli

#endif
