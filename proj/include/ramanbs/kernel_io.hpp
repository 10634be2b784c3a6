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

// Binary kernel files, all little-endian:
//
//   u32 kind (0 = storage, 1 = retrieval)
//   u64 nt
//   u64 nz
//   f64 dt (ns)
//   f64 dz
//   rows x cols complex entries, row-major, each as f64 re then f64 im
//
// Storage kernels have nz rows, retrieval kernels nt rows. The time origin
// is not stored; read_kernel places it at `t_start`.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "ramanbs/dynamics.hpp"

namespace ramanbs {

namespace detail {

template <class T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    require(static_cast<bool>(in), ErrorKind::io, "kernel file: truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace detail

inline void write_kernel(std::ostream& out, const KernelMatrix& k) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.kind()));
    detail::put_le<std::uint64_t>(out, k.time_grid().size());
    detail::put_le<std::uint64_t>(out, k.space_grid().size());
    detail::put_le<double>(out, k.time_grid().dt());
    detail::put_le<double>(out, k.space_grid().dz());
    const auto& m = k.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            detail::put_le<double>(out, m(r, c).real());
            detail::put_le<double>(out, m(r, c).imag());
        }
    }
}

inline KernelMatrix read_kernel(std::istream& in, double t_start = 0.0) {
    const auto kind = detail::get_le<std::uint32_t>(in);
    require(kind <= 1, ErrorKind::io, "kernel file: unknown kind");
    const auto nt = detail::get_le<std::uint64_t>(in);
    const auto nz = detail::get_le<std::uint64_t>(in);
    const double dt = detail::get_le<double>(in);
    const double dz = detail::get_le<double>(in);
    const SpaceGrid space(nz);
    require(std::abs(space.dz() - dz) <= 1e-12, ErrorKind::io, "kernel file: inconsistent dz");
    const TimeGrid time(t_start, dt, nt);
    const bool storage = kind == 0;
    const auto rows = static_cast<Eigen::Index>(storage ? nz : nt);
    const auto cols = static_cast<Eigen::Index>(storage ? nt : nz);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = detail::get_le<double>(in);
            const double im = detail::get_le<double>(in);
            m(r, c) = cplx(re, im);
        }
    }
    return KernelMatrix(static_cast<KernelKind>(kind), time, space, std::move(m));
}

inline void write_kernel(const std::filesystem::path& path, const KernelMatrix& k) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
    write_kernel(out, k);
}

inline KernelMatrix read_kernel(const std::filesystem::path& path, double t_start = 0.0) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
    return read_kernel(in, t_start);
}

}  // namespace ramanbs
