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
#ifndef ISAC_TEST_HELPERS_HPP
#define ISAC_TEST_HELPERS_HPP

#include <cmath>

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace testing
{
    inline isac::CMatrix random_cmatrix(int rows, int cols, isac::Rng &rng, double var = 1.0)
    {
        isac::CMatrix m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
                m(i, j) = rng.complex_normal(var);
        return m;
    }

    inline isac::RMatrix random_rmatrix(int rows, int cols, isac::Rng &rng, double scale = 1.0)
    {
        isac::RMatrix m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
                m(i, j) = scale * rng.normal();
        return m;
    }

    inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-12, std::max(std::abs(a), std::abs(b))); }
}

#endif
