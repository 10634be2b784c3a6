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

// Linearised, adiabatically eliminated Raman interaction at two-photon
// resonance, in the dimensionless cell coordinate z in [0, 1]:
//
//     dA/dz   = i sqrt(C) Omega(tau)       B(z, tau)
//     dB/dtau = i sqrt(C) conj(Omega(tau)) A(z, tau)
//
// A is the signal amplitude, B the spin wave, Omega the control envelope.
// Eliminating A gives d^2 B / dz dw = -C B in the integrated control energy
// w(tau) = int |Omega|^2, whose Riemann function is J0(2 sqrt(C z w)).
// The direct integrator below is the reference; the closed-form Bessel
// kernels are an independent cross-check.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <vector>

#include "ramanbs/error.hpp"
#include "ramanbs/field.hpp"
#include "ramanbs/grid.hpp"
#include "ramanbs/parallel.hpp"

namespace ramanbs {

struct MemoryParams {
    /// Effective Raman coupling; only the product C * w matters.
    double coupling = 0.0;
    /// Single-photon detuning (GHz). Recorded only: Stark shifts and the
    /// detuning-dependent phases are absorbed into the field definitions.
    double detuning_ghz = 15.0;
    double two_photon_detuning_ghz = 0.0;

    void validate() const {
        require(coupling >= 0 && std::isfinite(coupling), ErrorKind::invalid_argument,
                "coupling must be finite and non-negative");
        require(two_photon_detuning_ghz == 0.0, ErrorKind::invalid_argument,
                "only two-photon resonant dynamics are implemented");
    }
};

struct SolverOptions {
    /// Relative error bound on the Richardson estimate.
    double tolerance = 1e-4;
    bool check_convergence = true;
    std::size_t max_kernel_entries = 100'000'000;
    /// Worker threads for kernel construction (0 = hardware concurrency).
    unsigned threads = 0;
};

/// Multiply the spin wave by `amplitude_factor` between time samples
/// `after_index` and `after_index + 1`. Used for decoherence between the
/// pulses of a continuous read train.
struct DecayStep {
    std::size_t after_index;
    double amplitude_factor;
};

namespace detail {

struct Propagation {
    std::vector<cplx> a_exit;   // A(z = 1, tau_i)
    std::vector<cplx> b_final;  // B(z_j, tau_end)
};

/// Box-scheme march over the (z, tau) grid: trapezoid rule along z for A
/// and along tau for B, with the 2x2 implicit coupling at each new node
/// solved exactly. Second-order accurate in both steps.
inline Propagation propagate(std::span<const cplx> a_in, std::span<const cplx> rabi,
                             double dt, std::span<const cplx> b_init, double hz,
                             double coupling, std::span<const DecayStep> decays = {}) {
    const std::size_t nt = a_in.size();
    const std::size_t nz = b_init.size();
    const cplx i_sqrt_c{0.0, std::sqrt(coupling)};

    std::vector<cplx> g(nt), gbar(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        g[i] = i_sqrt_c * rabi[i];
        gbar[i] = i_sqrt_c * std::conj(rabi[i]);
    }
    std::vector<double> factor(nt, 1.0);  // factor[i] applies on step i -> i+1
    for (const auto& d : decays)
        if (d.after_index + 1 < nt) factor[d.after_index] *= d.amplitude_factor;

    std::vector<cplx> a_row(a_in.begin(), a_in.end());
    std::vector<cplx> b_row(nt);
    Propagation out;
    out.b_final.resize(nz);

    // Entrance face: only the tau-direction update.
    b_row[0] = b_init[0];
    for (std::size_t i = 0; i + 1 < nt; ++i)
        b_row[i + 1] = factor[i] * b_row[i] +
                       0.5 * dt * (gbar[i] * a_row[i] + gbar[i + 1] * a_row[i + 1]);
    out.b_final[0] = b_row[nt - 1];

    std::vector<cplx> a_next(nt), b_next(nt);
    for (std::size_t j = 1; j < nz; ++j) {
        b_next[0] = b_init[j];
        a_next[0] = a_row[0] + 0.5 * hz * g[0] * (b_row[0] + b_next[0]);
        for (std::size_t i = 0; i + 1 < nt; ++i) {
            const cplx c0 = a_row[i + 1] + 0.5 * hz * g[i + 1] * b_row[i + 1];
            const cplx c1 = 0.5 * hz * g[i + 1];
            const cplx d0 = factor[i] * b_next[i] + 0.5 * dt * gbar[i] * a_next[i];
            const cplx d1 = 0.5 * dt * gbar[i + 1];
            const cplx b = (d0 + d1 * c0) / (1.0 - d1 * c1);
            b_next[i + 1] = b;
            a_next[i + 1] = c0 + c1 * b;
        }
        std::swap(a_row, a_next);
        std::swap(b_row, b_next);
        out.b_final[j] = b_row[nt - 1];
    }
    out.a_exit = std::move(a_row);
    return out;
}

template <class T>
std::vector<T> every_other(std::span<const T> v) {
    std::vector<T> out;
    out.reserve(v.size() / 2 + 1);
    for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
    return out;
}

inline std::vector<double> trapezoid(std::size_t n, double h) {
    std::vector<double> w(n, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

/// Richardson estimate of the relative error of the fine solution: re-solve
/// with every other sample in each dimension that has an odd sample count
/// and scale the difference by 1/3 (second-order scheme). Returns 0 when
/// no dimension can be coarsened.
inline double richardson_estimate(const Propagation& fine, std::span<const cplx> a_in,
                                  std::span<const cplx> rabi, double dt,
                                  std::span<const cplx> b_init, double coupling,
                                  std::span<const DecayStep> decays) {
    const std::size_t nt = a_in.size();
    const std::size_t nz = b_init.size();
    const bool coarse_t = nt % 2 == 1 && nt >= 5;
    const bool coarse_z = nz % 2 == 1 && nz >= 5;
    if (!coarse_t && !coarse_z) return 0.0;

    const double hz = 1.0 / static_cast<double>(nz - 1);
    double scale = 0.0;
    {
        const auto wt = trapezoid(nt, dt);
        const auto wz = trapezoid(nz, hz);
        scale = detail::weighted_norm2(a_in, wt) + detail::weighted_norm2(b_init, wz);
    }
    if (scale == 0.0) return 0.0;

    const auto a_c = coarse_t ? every_other(a_in) : std::vector<cplx>(a_in.begin(), a_in.end());
    const auto r_c = coarse_t ? every_other(rabi) : std::vector<cplx>(rabi.begin(), rabi.end());
    const auto b_c = coarse_z ? every_other(b_init) : std::vector<cplx>(b_init.begin(), b_init.end());
    std::vector<DecayStep> d_c(decays.begin(), decays.end());
    if (coarse_t)
        for (auto& d : d_c) d.after_index /= 2;
    const double dt_c = coarse_t ? 2 * dt : dt;
    const auto coarse = propagate(a_c, r_c, dt_c, b_c, coarse_z ? 2 * hz : hz, coupling, d_c);

    const std::size_t st = coarse_t ? 2 : 1;
    const std::size_t sz = coarse_z ? 2 : 1;
    const auto wt_c = trapezoid(a_c.size(), dt_c);
    const auto wz_c = trapezoid(b_c.size(), coarse_z ? 2 * hz : hz);
    double diff = 0.0;
    for (std::size_t i = 0; i < a_c.size(); ++i)
        diff += wt_c[i] * std::norm(fine.a_exit[i * st] - coarse.a_exit[i]);
    for (std::size_t j = 0; j < b_c.size(); ++j)
        diff += wz_c[j] * std::norm(fine.b_final[j * sz] - coarse.b_final[j]);
    return std::sqrt(diff / scale) / 3.0;
}

}  // namespace detail

struct InteractionResult {
    SignalField optical;   // field leaving the cell (z = 1)
    SpinWave spin_wave;    // spin wave at the end of the time window
    double error_estimate; // Richardson estimate, relative to input norm
};

/// General solve with both an optical input and an initial spin wave.
inline InteractionResult solve_interaction(const SignalField& a_in, const ControlField& control,
                                           const MemoryParams& params, const SpinWave& b_init,
                                           const SolverOptions& opts = {},
                                           std::span<const DecayStep> decays = {}) {
    params.validate();
    require_same_grid(a_in.grid(), control.grid(), "solve");
    auto prop = detail::propagate(a_in.samples(), control.samples(), a_in.grid().dt(),
                                  b_init.samples(), b_init.grid().dz(), params.coupling,
                                  decays);
    double est = 0.0;
    if (opts.check_convergence) {
        est = detail::richardson_estimate(prop, a_in.samples(), control.samples(),
                                          a_in.grid().dt(), b_init.samples(),
                                          params.coupling, decays);
        if (est > opts.tolerance) {
            std::ostringstream os;
            os << "solver did not converge: estimated relative error " << est
               << " exceeds tolerance " << opts.tolerance
               << " (refine dt or nz)";
            throw Error(ErrorKind::non_convergence, os.str());
        }
    }
    return InteractionResult{SignalField(a_in.grid(), std::move(prop.a_exit)),
                             SpinWave(b_init.grid(), std::move(prop.b_final)), est};
}

struct StorageResult {
    SignalField transmitted;
    SpinWave spin_wave;
    double error_estimate;
};

inline StorageResult solve_storage(const SignalField& a_in, const ControlField& control,
                                   const MemoryParams& params, const SpinWave& b_init,
                                   const SolverOptions& opts = {}) {
    auto r = solve_interaction(a_in, control, params, b_init, opts);
    return StorageResult{std::move(r.optical), std::move(r.spin_wave), r.error_estimate};
}

inline StorageResult solve_storage(const SignalField& a_in, const ControlField& control,
                                   const MemoryParams& params, const SpaceGrid& space,
                                   const SolverOptions& opts = {}) {
    return solve_storage(a_in, control, params, SpinWave::zeros(space), opts);
}

struct RetrievalResult {
    SignalField output;
    SpinWave remaining;
    double error_estimate;
};

/// Forward retrieval with a vacuum optical input.
inline RetrievalResult solve_retrieval(const SpinWave& b_in, const ControlField& control,
                                       const MemoryParams& params,
                                       const SolverOptions& opts = {},
                                       std::span<const DecayStep> decays = {}) {
    auto r = solve_interaction(SignalField::zeros(control.grid()), control, params, b_in,
                               opts, decays);
    return RetrievalResult{std::move(r.optical), std::move(r.spin_wave), r.error_estimate};
}

enum class KernelKind : std::uint32_t { storage = 0, retrieval = 1 };

/// Discretised Green's function. Storage kernels are nz x nt and act on
/// time samples, B = K (w_t .* A); retrieval kernels are nt x nz, with
/// A = K (w_z .* B). Weights are trapezoid quadrature weights.
class KernelMatrix {
  public:
    KernelMatrix(KernelKind kind, TimeGrid time, SpaceGrid space, Eigen::MatrixXcd m)
        : kind_(kind), time_(time), space_(space), m_(std::move(m)) {
        const auto rows = static_cast<Eigen::Index>(kind == KernelKind::storage ? space.size() : time.size());
        const auto cols = static_cast<Eigen::Index>(kind == KernelKind::storage ? time.size() : space.size());
        require(m_.rows() == rows && m_.cols() == cols, ErrorKind::invalid_argument,
                "kernel matrix shape does not match its grids");
    }

    KernelKind kind() const noexcept { return kind_; }
    const TimeGrid& time_grid() const noexcept { return time_; }
    const SpaceGrid& space_grid() const noexcept { return space_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return m_; }

    std::vector<double> input_weights() const {
        return kind_ == KernelKind::storage ? time_.weights() : space_.weights();
    }
    std::vector<double> output_weights() const {
        return kind_ == KernelKind::storage ? space_.weights() : time_.weights();
    }

    /// Quadrature-weighted operator sqrt(W_out) K sqrt(W_in); its singular
    /// values are the beam-splitter amplitudes.
    Eigen::MatrixXcd weighted() const {
        const auto wi = input_weights();
        const auto wo = output_weights();
        Eigen::MatrixXcd out = m_;
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            out.col(c) *= std::sqrt(wi[static_cast<std::size_t>(c)]);
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            out.row(r) *= std::sqrt(wo[static_cast<std::size_t>(r)]);
        return out;
    }

    SpinWave apply(const SignalField& a) const {
        require(kind_ == KernelKind::storage, ErrorKind::invalid_argument,
                "retrieval kernels act on spin waves");
        require_same_grid(a.grid(), time_, "kernel apply");
        const auto w = time_.weights();
        Eigen::VectorXcd x(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) x[static_cast<Eigen::Index>(i)] = w[i] * a[i];
        const Eigen::VectorXcd y = m_ * x;
        return SpinWave(space_, std::vector<cplx>(y.data(), y.data() + y.size()));
    }

    SignalField apply(const SpinWave& b) const {
        require(kind_ == KernelKind::retrieval, ErrorKind::invalid_argument,
                "storage kernels act on signal fields");
        require(b.grid() == space_, ErrorKind::grid_mismatch, "kernel apply: space grid");
        const auto w = space_.weights();
        Eigen::VectorXcd x(static_cast<Eigen::Index>(b.size()));
        for (std::size_t j = 0; j < b.size(); ++j) x[static_cast<Eigen::Index>(j)] = w[j] * b[j];
        const Eigen::VectorXcd y = m_ * x;
        return SignalField(time_, std::vector<cplx>(y.data(), y.data() + y.size()));
    }

  private:
    KernelKind kind_;
    TimeGrid time_;
    SpaceGrid space_;
    Eigen::MatrixXcd m_;
};

namespace detail {

/// An impulse on a boundary node only sees a one-sided half cell, so its
/// response samples the kernel half a step inside the domain. Linear
/// extrapolation against the neighbouring column restores the nodal value
/// to second order.
inline void correct_boundary_columns(Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.cols();
    if (n < 3) return;
    m.col(0) = 2.0 * m.col(0) - m.col(1);
    m.col(n - 1) = 2.0 * m.col(n - 1) - m.col(n - 2);
}

}  // namespace detail

/// Kernel built column by column from the direct integrator: column k is
/// the response to a unit-weight impulse at input sample k. The equations
/// are shift-invariant, so each impulse is marched only from the sample
/// before it.
inline KernelMatrix build_kernel(KernelKind kind, const ControlField& control,
                                 const SpaceGrid& space, const MemoryParams& params,
                                 const SolverOptions& opts = {}) {
    params.validate();
    const std::size_t nt = control.size();
    const std::size_t nz = space.size();
    require(nt * nz <= opts.max_kernel_entries, ErrorKind::resource,
            "kernel of " + std::to_string(nt) + " x " + std::to_string(nz) +
                " entries exceeds the configured cap");
    const auto rabi = control.samples();
    const double dt = control.grid().dt();

    if (kind == KernelKind::storage) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nz),
                                                    static_cast<Eigen::Index>(nt));
        const auto wt = control.grid().weights();
        const std::vector<cplx> zero_b(nz);
        detail::parallel_for(nt, opts.threads, [&](std::size_t i) {
            // Start one sample early: the trapezoid step into sample i also
            // carries half of the impulse.
            const std::size_t first = i == 0 ? 0 : i - 1;
            std::vector<cplx> a(nt - first);
            a[i - first] = 1.0 / wt[i];
            const auto p = detail::propagate(a, rabi.subspan(first), dt, zero_b, space.dz(),
                                            params.coupling);
            for (std::size_t j = 0; j < nz; ++j)
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p.b_final[j];
        });
        detail::correct_boundary_columns(m);
        return KernelMatrix(kind, control.grid(), space, std::move(m));
    }

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nt),
                                                static_cast<Eigen::Index>(nz));
    const auto wz = space.weights();
    const std::vector<cplx> zero_a(nt);
    detail::parallel_for(nz, opts.threads, [&](std::size_t j) {
        const std::size_t first = j == 0 ? 0 : j - 1;
        std::vector<cplx> b(nz - first);
        b[j - first] = 1.0 / wz[j];
        const auto p = detail::propagate(zero_a, rabi, dt, b, space.dz(), params.coupling);
        for (std::size_t i = 0; i < nt; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p.a_exit[i];
    });
    detail::correct_boundary_columns(m);
    return KernelMatrix(kind, control.grid(), space, std::move(m));
}

/// Closed-form storage Green's function
///     K_s(z, tau) = i sqrt(C) conj(Omega(tau)) J0(2 sqrt(C z [W - w(tau)]))
/// sampled on the solver grids (w by trapezoid quadrature).
inline KernelMatrix bessel_green_storage(const ControlField& control, const SpaceGrid& space,
                                         const MemoryParams& params) {
    params.validate();
    const auto w = integrated_energy(control);
    const double total = w.back();
    const double c = params.coupling;
    const cplx pre{0.0, std::sqrt(c)};
    const auto nt = static_cast<Eigen::Index>(control.size());
    const auto nz = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXcd m(nz, nt);
    for (Eigen::Index i = 0; i < nt; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const cplx amp = pre * std::conj(control[ii]);
        const double remaining = std::max(0.0, total - w[ii]);
        for (Eigen::Index j = 0; j < nz; ++j) {
            const double x = 2.0 * std::sqrt(c * space.z(static_cast<std::size_t>(j)) * remaining);
            m(j, i) = amp * std::cyl_bessel_j(0.0, x);
        }
    }
    return KernelMatrix(KernelKind::storage, control.grid(), space, std::move(m));
}

/// Closed-form forward-retrieval Green's function
///     K_r(tau, z) = i sqrt(C) Omega(tau) J0(2 sqrt(C (1 - z) w(tau))).
inline KernelMatrix bessel_green_retrieval(const ControlField& control, const SpaceGrid& space,
                                           const MemoryParams& params) {
    params.validate();
    const auto w = integrated_energy(control);
    const double c = params.coupling;
    const cplx pre{0.0, std::sqrt(c)};
    const auto nt = static_cast<Eigen::Index>(control.size());
    const auto nz = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXcd m(nt, nz);
    for (Eigen::Index i = 0; i < nt; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const cplx amp = pre * control[ii];
        for (Eigen::Index j = 0; j < nz; ++j) {
            const double depth = 1.0 - space.z(static_cast<std::size_t>(j));
            m(i, j) = amp * std::cyl_bessel_j(0.0, 2.0 * std::sqrt(c * depth * w[ii]));
        }
    }
    return KernelMatrix(KernelKind::retrieval, control.grid(), space, std::move(m));
}

/// Max entrywise deviation relative to the largest entry of `reference`.
inline double kernel_deviation(const KernelMatrix& k, const KernelMatrix& reference) {
    require(k.kind() == reference.kind() && k.matrix().rows() == reference.matrix().rows() &&
                k.matrix().cols() == reference.matrix().cols(),
            ErrorKind::grid_mismatch, "kernel comparison: incompatible kernels");
    const double diff = (k.matrix() - reference.matrix()).cwiseAbs().maxCoeff();
    const double scale = reference.matrix().cwiseAbs().maxCoeff();
    if (scale == 0.0) return diff;
    return diff / scale;
}

/// Check the integrator kernel against the closed form. Throws a
/// disagreement error when the deviation exceeds ten times the expected
/// discretisation error; returns the deviation otherwise.
inline double cross_validate(const KernelMatrix& pde, const KernelMatrix& analytic,
                             double expected_error) {
    const double dev = kernel_deviation(pde, analytic);
    if (dev > 10.0 * expected_error) {
        std::ostringstream os;
        os << "integrator and closed-form kernels disagree: max relative deviation "
           << dev << " vs expected " << expected_error;
        throw Error(ErrorKind::disagreement, os.str());
    }
    return dev;
}

}  // namespace ramanbs
