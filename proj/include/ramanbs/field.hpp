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
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "ramanbs/error.hpp"
#include "ramanbs/grid.hpp"

namespace ramanbs {

using cplx = std::complex<double>;

namespace detail {

inline bool all_finite(std::span<const cplx> v) {
    for (const auto& x : v) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    }
    return true;
}

inline double weighted_norm2(std::span<const cplx> v, std::span<const double> w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * std::norm(v[i]);
    return acc;
}

}  // namespace detail

/// Complex envelope sampled on a TimeGrid. The tag keeps signal amplitudes
/// (sqrt(photons/ns)) and control envelopes from being mixed up.
template <class Tag>
class TemporalField {
  public:
    TemporalField(TimeGrid grid, std::vector<cplx> samples)
        : grid_(grid), samples_(std::move(samples)) {
        require(samples_.size() == grid_.size(), ErrorKind::invalid_argument,
                "temporal field: sample count does not match grid");
        require(detail::all_finite(samples_), ErrorKind::invalid_argument,
                "temporal field: non-finite sample");
    }

    static TemporalField zeros(const TimeGrid& grid) {
        return TemporalField(grid, std::vector<cplx>(grid.size()));
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const cplx> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    cplx operator[](std::size_t i) const { return samples_[i]; }

    TemporalField scaled(cplx factor) const {
        auto out = samples_;
        for (auto& x : out) x *= factor;
        return TemporalField(grid_, std::move(out));
    }

    /// Same samples viewed as another kind of field.
    template <class Other>
    Other as() const {
        return Other(grid_, samples_);
    }

  private:
    TimeGrid grid_;
    std::vector<cplx> samples_;
};

struct SignalTag {};
struct ControlTag {};

using SignalField = TemporalField<SignalTag>;
using ControlField = TemporalField<ControlTag>;

/// Pulse energy: trapezoid quadrature of |A|^2 over the grid.
template <class Tag>
double energy(const TemporalField<Tag>& f) {
    const auto w = f.grid().weights();
    return detail::weighted_norm2(f.samples(), w);
}

/// Running integral w(tau) of |Omega|^2 (trapezoid), w(t_start) = 0.
inline std::vector<double> integrated_energy(const ControlField& control) {
    const auto s = control.samples();
    const double dt = control.grid().dt();
    std::vector<double> w(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i)
        w[i] = w[i - 1] + 0.5 * dt * (std::norm(s[i - 1]) + std::norm(s[i]));
    return w;
}

/// Stored spin-wave amplitude over z in [0, 1].
class SpinWave {
  public:
    SpinWave(SpaceGrid grid, std::vector<cplx> samples)
        : grid_(grid), samples_(std::move(samples)) {
        require(samples_.size() == grid_.size(), ErrorKind::invalid_argument,
                "spin wave: sample count does not match grid");
        require(detail::all_finite(samples_), ErrorKind::invalid_argument,
                "spin wave: non-finite sample");
    }

    static SpinWave zeros(const SpaceGrid& grid) {
        return SpinWave(grid, std::vector<cplx>(grid.size()));
    }

    const SpaceGrid& grid() const noexcept { return grid_; }
    std::span<const cplx> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    cplx operator[](std::size_t j) const { return samples_[j]; }

    SpinWave scaled(cplx factor) const {
        auto out = samples_;
        for (auto& x : out) x *= factor;
        return SpinWave(grid_, std::move(out));
    }

  private:
    SpaceGrid grid_;
    std::vector<cplx> samples_;
};

/// Stored excitation: trapezoid quadrature of |B|^2 over z.
inline double excitation(const SpinWave& b) {
    const auto w = b.grid().weights();
    return detail::weighted_norm2(b.samples(), w);
}

}  // namespace ramanbs
