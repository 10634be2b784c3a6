// Copyright 2026 The ramanbs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <complex>
#include <ostream>
#include <string>

#include "ramanbs/error.hpp"
#include "ramanbs/field.hpp"

namespace ramanbs {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    require(res.ec == std::errc{}, ErrorKind::io, "format_double: conversion failed");
    return std::string(buf, res.ptr);
}

/// Trace CSV: time_ns, |A|^2, Re A, Im A.
template <class Tag>
void write_trace_csv(std::ostream& out, const TemporalField<Tag>& f) {
    out << "time_ns,intensity,re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx v = f[i];
        out << format_double(f.grid().time(i)) << ',' << format_double(std::norm(v)) << ','
            << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
}

}  // namespace ramanbs
