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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ramanbs {

enum class ErrorKind {
    invalid_argument,
    grid_mismatch,
    pulse_clipped,
    pulse_overlap,
    negative_trace,
    non_convergence,
    resource,
    disagreement,
    index_out_of_range,
    infeasible_target,
    non_monotone_bracket,
    saturation,
    degenerate,
    gating_ambiguity,
    io,
    config,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::grid_mismatch: return "grid_mismatch";
        case ErrorKind::pulse_clipped: return "pulse_clipped";
        case ErrorKind::pulse_overlap: return "pulse_overlap";
        case ErrorKind::negative_trace: return "negative_trace";
        case ErrorKind::non_convergence: return "non_convergence";
        case ErrorKind::resource: return "resource";
        case ErrorKind::disagreement: return "disagreement";
        case ErrorKind::index_out_of_range: return "index_out_of_range";
        case ErrorKind::infeasible_target: return "infeasible_target";
        case ErrorKind::non_monotone_bracket: return "non_monotone_bracket";
        case ErrorKind::saturation: return "saturation";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::gating_ambiguity: return "gating_ambiguity";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

/// Single exception type for the library; the kind tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace ramanbs
