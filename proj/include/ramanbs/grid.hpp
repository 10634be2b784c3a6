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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ramanbs/error.hpp"

namespace ramanbs {

/// Uniform time grid in nanoseconds: t_i = t_start + i * dt, i in [0, n).
class TimeGrid {
  public:
    TimeGrid(double t_start, double dt, std::size_t n)
        : t_start_(t_start), dt_(dt), n_(n) {
        require(dt > 0 && std::isfinite(dt), ErrorKind::invalid_argument,
                "time grid: dt must be positive and finite");
        require(n >= 2, ErrorKind::invalid_argument,
                "time grid: need at least two samples");
        require(std::isfinite(t_start) && std::isfinite(t_end()),
                ErrorKind::invalid_argument, "time grid: span is not finite");
    }

    /// Grid of spacing dt covering [center - half_width, center + half_width].
    static TimeGrid centered(double center, double half_width, double dt) {
        const auto half = static_cast<std::size_t>(std::llround(half_width / dt));
        return TimeGrid(center - static_cast<double>(half) * dt, dt, 2 * half + 1);
    }

    double t_start() const noexcept { return t_start_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return n_; }
    double time(std::size_t i) const noexcept {
        return t_start_ + static_cast<double>(i) * dt_;
    }
    double t_end() const noexcept { return time(n_ - 1); }

    /// Trapezoid quadrature weights.
    std::vector<double> weights() const {
        std::vector<double> w(n_, dt_);
        w.front() = w.back() = 0.5 * dt_;
        return w;
    }

    /// Same sampling up to rounding in the time origin.
    bool same_as(const TimeGrid& other) const noexcept {
        return n_ == other.n_ && std::abs(dt_ - other.dt_) <= 1e-12 * dt_ &&
               std::abs(t_start_ - other.t_start_) <= 1e-9 * dt_;
    }

  private:
    double t_start_;
    double dt_;
    std::size_t n_;
};

/// Uniform grid over the dimensionless cell coordinate z in [0, 1],
/// endpoints included. z = 0 is the entrance face.
class SpaceGrid {
  public:
    explicit SpaceGrid(std::size_t nz) : nz_(nz) {
        require(nz >= 2, ErrorKind::invalid_argument,
                "space grid: need at least two nodes");
    }

    std::size_t size() const noexcept { return nz_; }
    double dz() const noexcept { return 1.0 / static_cast<double>(nz_ - 1); }
    double z(std::size_t j) const noexcept {
        return static_cast<double>(j) / static_cast<double>(nz_ - 1);
    }

    std::vector<double> weights() const {
        std::vector<double> w(nz_, dz());
        w.front() = w.back() = 0.5 * dz();
        return w;
    }

    bool operator==(const SpaceGrid&) const = default;

  private:
    std::size_t nz_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b,
                              const std::string& context) {
    require(a.same_as(b), ErrorKind::grid_mismatch,
            context + ": fields are sampled on different time grids");
}

}  // namespace ramanbs
