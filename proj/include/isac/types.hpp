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

#ifndef ISAC_TYPES_HPP
#define ISAC_TYPES_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isac
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // m/s

    // Error categories surfaced through the C API as status codes.
    enum class ErrorKind
    {
        invalid_argument = 1,
        config = 2,
        numerical = 3,
        io = 4,
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    [[noreturn]] inline void fail(const std::string &what) { throw Error(ErrorKind::invalid_argument, what); }
    [[noreturn]] inline void fail_numerical(const std::string &what) { throw Error(ErrorKind::numerical, what); }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
}

#endif
