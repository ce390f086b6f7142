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
#include "isac/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "isac/types.hpp"

namespace isac::io
{
    std::string format_number(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        if (value == 0.0)
            return "0"; // folds -0
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", value);
        return buf;
    }

    CsvWriter::CsvWriter(const std::string &path, const std::vector<std::string> &header)
        : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_)
            throw Error(ErrorKind::io, "cannot open " + path + " for writing");
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    void CsvWriter::row(const std::vector<Cell> &cells)
    {
        if (cells.size() != columns_)
            fail("csv row width does not match the header");
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out_ << ',';
            if (const auto *d = std::get_if<double>(&cells[i]))
                out_ << format_number(*d);
            else if (const auto *n = std::get_if<long long>(&cells[i]))
                out_ << *n;
            else
                out_ << std::get<std::string>(cells[i]);
        }
        out_ << '\n';
    }

    void CsvWriter::close()
    {
        out_.close();
        if (out_.fail())
            throw Error(ErrorKind::io, "failed writing " + path_);
    }

    int CsvTable::column(const std::string &name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return static_cast<int>(i);
        return -1;
    }

    CsvTable read_csv(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::io, "cannot open " + path);
        CsvTable t;
        std::string line;
        bool first = true;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                cells.push_back(cell);
            if (first)
                t.header = std::move(cells);
            else
                t.rows.push_back(std::move(cells));
            first = false;
        }
        return t;
    }
}
