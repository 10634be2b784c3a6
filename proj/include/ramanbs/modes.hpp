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

// Schmidt decomposition of storage/retrieval kernels. Each pair of input
// and output modes is coupled by an independent beam splitter whose
// reflectivity is the squared singular value.

#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ramanbs/dynamics.hpp"
#include "ramanbs/error.hpp"
#include "ramanbs/field.hpp"
#include "ramanbs/io.hpp"

namespace ramanbs {

struct ModeDecomposition {
    KernelKind kind;
    TimeGrid time_grid;
    SpaceGrid space_grid;
    /// Columns are modes, orthonormal under the quadrature inner product.
    Eigen::MatrixXcd input_modes;
    Eigen::MatrixXcd output_modes;
    std::vector<double> singular_values;  // non-increasing
    std::vector<double> reflectivities;   // singular_values^2
    std::vector<double> input_weights;
    std::vector<double> output_weights;

    std::size_t size() const noexcept { return singular_values.size(); }
};

/// SVD of the quadrature-weighted kernel sqrt(W_out) K sqrt(W_in). Modes
/// with singular value below `truncation` are dropped (pass 0 to keep all).
inline ModeDecomposition decompose(const KernelMatrix& k, double truncation = 1e-6) {
    const Eigen::MatrixXcd m = k.weighted();
    require(m.allFinite(), ErrorKind::invalid_argument, "decompose: non-finite kernel");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(svd.info() == Eigen::Success, ErrorKind::non_convergence, "decompose: SVD failed");

    const auto& s = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < s.size() && s[keep] >= truncation) ++keep;

    ModeDecomposition d{k.kind(), k.time_grid(), k.space_grid(), {}, {}, {}, {},
                        k.input_weights(), k.output_weights()};
    d.input_modes = svd.matrixV().leftCols(keep);
    d.output_modes = svd.matrixU().leftCols(keep);
    for (Eigen::Index r = 0; r < d.input_modes.rows(); ++r)
        d.input_modes.row(r) /= std::sqrt(d.input_weights[static_cast<std::size_t>(r)]);
    for (Eigen::Index r = 0; r < d.output_modes.rows(); ++r)
        d.output_modes.row(r) /= std::sqrt(d.output_weights[static_cast<std::size_t>(r)]);
    for (Eigen::Index i = 0; i < keep; ++i) {
        d.singular_values.push_back(s[i]);
        d.reflectivities.push_back(s[i] * s[i]);
    }
    return d;
}

/// Kernel rebuilt from the retained modes (unweighted representation).
inline Eigen::MatrixXcd reconstruct(const ModeDecomposition& d) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d.output_modes.rows(), d.input_modes.rows());
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out += d.singular_values[k] * d.output_modes.col(kk) * d.input_modes.col(kk).adjoint();
    }
    return out;
}

namespace detail {

inline cplx overlap_with(std::span<const cplx> v, const ModeDecomposition& d, std::size_t k) {
    require(k < d.size(), ErrorKind::index_out_of_range,
            "mode index " + std::to_string(k) + " out of range (" + std::to_string(d.size()) +
                " modes)");
    cplx acc = 0.0;
    const auto col = d.input_modes.col(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < v.size(); ++i)
        acc += d.input_weights[i] * std::conj(col[static_cast<Eigen::Index>(i)]) * v[i];
    return acc;
}

}  // namespace detail

/// Quadrature inner product of a signal with input mode k of a storage
/// decomposition.
inline cplx mode_overlap(const SignalField& field, const ModeDecomposition& d, std::size_t k) {
    require(d.kind == KernelKind::storage, ErrorKind::invalid_argument,
            "mode_overlap: signal fields project onto storage input modes");
    require_same_grid(field.grid(), d.time_grid, "mode_overlap");
    return detail::overlap_with(field.samples(), d, k);
}

/// Inner product of a spin wave with input mode k of a retrieval
/// decomposition.
inline cplx mode_overlap(const SpinWave& b, const ModeDecomposition& d, std::size_t k) {
    require(d.kind == KernelKind::retrieval, ErrorKind::invalid_argument,
            "mode_overlap: spin waves project onto retrieval input modes");
    require(b.grid() == d.space_grid, ErrorKind::grid_mismatch, "mode_overlap: space grid");
    return detail::overlap_with(b.samples(), d, k);
}

/// Input mode k as a signal field (storage decompositions only).
inline SignalField input_mode_field(const ModeDecomposition& d, std::size_t k) {
    require(d.kind == KernelKind::storage, ErrorKind::invalid_argument,
            "input_mode_field: storage decomposition required");
    require(k < d.size(), ErrorKind::index_out_of_range, "mode index out of range");
    const auto col = d.input_modes.col(static_cast<Eigen::Index>(k));
    return SignalField(d.time_grid, std::vector<cplx>(col.data(), col.data() + col.size()));
}

/// Mode CSV: grid coordinate first, then an (Re, Im) column pair per mode.
/// `output_side` selects the output modes instead of the input modes.
inline void write_modes_csv(std::ostream& out, const ModeDecomposition& d, std::size_t count,
                            bool output_side = false) {
    count = std::min(count, d.size());
    const auto& modes = output_side ? d.output_modes : d.input_modes;
    const bool over_time = (d.kind == KernelKind::storage) != output_side;
    out << (over_time ? "time_ns" : "z");
    for (std::size_t k = 0; k < count; ++k) out << ",re_mode" << k << ",im_mode" << k;
    out << '\n';
    for (Eigen::Index r = 0; r < modes.rows(); ++r) {
        const auto i = static_cast<std::size_t>(r);
        out << format_double(over_time ? d.time_grid.time(i) : d.space_grid.z(i));
        for (std::size_t k = 0; k < count; ++k) {
            const cplx v = modes(r, static_cast<Eigen::Index>(k));
            out << ',' << format_double(v.real()) << ',' << format_double(v.imag());
        }
        out << '\n';
    }
}

}  // namespace ramanbs
