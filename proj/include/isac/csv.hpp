// SPDX-License-Identifier: Apache-2.0
//
// isac-toolkit: design and evaluation of integrated sensing and communication
// Copyright (C) 2026 isac-toolkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef ISAC_CSV_HPP
#define ISAC_CSV_HPP

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace isac::io
{
    // Numbers are written with 9 significant digits, strings verbatim (no quoting;
    // method names never contain commas).
    using Cell = std::variant<double, long long, std::string>;

    std::string format_number(double value);

    class CsvWriter
    {
    public:
        CsvWriter(const std::string &path, const std::vector<std::string> &header);
        void row(const std::vector<Cell> &cells);
        void close();
        const std::string &path() const { return path_; }

    private:
        std::string path_;
        std::size_t columns_ = 0;
        std::ofstream out_;
    };

    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
        int column(const std::string &name) const; // -1 when absent
    };

    CsvTable read_csv(const std::string &path);
}

#endif
