// Copyright 2026 The SIF Authors.
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


// File helpers shared by the command-line tools.

#ifndef SIF_IO_HPP_
#define SIF_IO_HPP_

#include <string>
#include <string_view>

namespace sif {

// Writes to a temporary sibling file, then renames it over `path`. Missing
// parent directories are created. Throws kIoError.
void write_file_atomic(const std::string& path, std::string_view contents);

// Throws kIoError.
std::string read_file(const std::string& path);

}  // namespace sif

#endif  // SIF_IO_HPP_
