// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent numerical checks of the closed-form coincidence probability:
//
//  * Monte Carlo over phase-diffusion trajectories, one Wiener path per
//    photon, integrating the squared two-path amplitude on a time grid;
//  * deterministic 2-D trapezoid quadrature of the pre-averaged
//    correlator integrand;
//  * a direct check of the two-time phase correlator.
//
// The carrier phase is carried as a single factor e^{i phase} on the
// interference term, so the integrands only contain the slow envelope.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "timebin/analytic.hpp"
#include "timebin/core_model.hpp"
#include "timebin/errors.hpp"
#include "timebin/philox.hpp"

namespace timebin {

//---------------------------------------------------------------------------//
// Grids and trajectories
//---------------------------------------------------------------------------//

struct TimeGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t n_points = 0;

    double step() const { return (t_max - t_min) / static_cast<double>(n_points - 1); }
    double span() const { return t_max - t_min; }
    double at(std::size_t k) const { return t_min + static_cast<double>(k) * step(); }
};

/// Uniform grid on [0, span_t1 * T1] with step at most min(T1, T2*) / divisor.
inline TimeGrid default_grid(const DerivedRates& rates, double divisor = 40.0, double span_t1 = 25.0) {
    if (!(divisor > 0.0) || !(span_t1 > 0.0)) {
        throw InvalidParameter("grid", "divisor and span must be positive");
    }
    const double shortest = rates.gamma > 0.0 ? std::min(rates.t1, 1.0 / rates.gamma) : rates.t1;
    const double span = span_t1 * rates.t1;
    const auto intervals = static_cast<std::size_t>(std::ceil(span / (shortest / divisor) - 1e-9));
    return TimeGrid{0.0, span, std::max<std::size_t>(intervals, 1) + 1};
}

/// Requires step <= min(T1, T2*)/20 and a span of at least 20 T1.
inline void check_grid(const TimeGrid& grid, const DerivedRates& rates) {
    if (grid.n_points < 2 || !(grid.t_max > grid.t_min)) {
        throw GridTooCoarse("time grid needs at least two points and t_max > t_min");
    }
    const double shortest = rates.gamma > 0.0 ? std::min(rates.t1, 1.0 / rates.gamma) : rates.t1;
    if (grid.step() > shortest / 20.0 * (1.0 + 1e-12)) {
        throw GridTooCoarse("grid step exceeds min(T1, T2*)/20");
    }
    if (grid.span() < 20.0 * rates.t1 * (1.0 - 1e-12)) {
        throw GridTooCoarse("grid span is shorter than 20*T1");
    }
}

struct PhaseTrajectory {
    TimeGrid grid;
    std::vector<double> phi;
    std::uint64_t seed = 0;
};

/// Wiener phase with phi(0) = 0 sampled at nondecreasing times >= 0;
/// increments have variance 2 gamma dt. Normal number i of `normals` is
/// used for the i-th time.
inline void sample_wiener_at(double gamma, std::span<const double> times, NormalStream& normals,
                             std::span<double> phi) {
    double previous_time = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dt = times[i] - previous_time;
        value += std::sqrt(2.0 * gamma * dt) * normals[i];
        phi[i] = value;
        previous_time = times[i];
    }
}

/// Wiener phase path on a uniform grid, phi[0] = 0 at grid.t_min.
inline PhaseTrajectory sample_phase_trajectory(double gamma, const TimeGrid& grid, std::uint64_t seed,
                                               std::uint64_t stream = 0) {
    if (!(gamma >= 0.0)) {
        throw InvalidParameter("gamma", "dephasing rate must be >= 0");
    }
    if (grid.n_points < 1) {
        throw GridTooCoarse("empty grid");
    }
    PhaseTrajectory path{grid, std::vector<double>(grid.n_points, 0.0), seed};
    NormalStream normals(seed, stream);
    const double scale = std::sqrt(2.0 * gamma * (grid.n_points > 1 ? grid.step() : 0.0));
    for (std::size_t k = 1; k < grid.n_points; ++k) {
        path.phi[k] = path.phi[k - 1] + scale * normals[k - 1];
    }
    return path;
}

//---------------------------------------------------------------------------//
// Reports and reductions
//---------------------------------------------------------------------------//

struct OracleReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double closed_form = 0.0;
    double z_score = 0.0;
    std::size_t n_samples = 0;
};

inline OracleReport make_report(double estimate, double std_error, double closed_form, std::size_t n) {
    OracleReport r{estimate, std_error, closed_form, 0.0, n};
    const double diff = estimate - closed_form;
    if (std_error > 0.0) {
        r.z_score = diff / std_error;
    } else if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(closed_form))) {
        r.z_score = 0.0;
    } else {
        r.z_score = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return r;
}

namespace detail {

/// Pairwise summation; the result depends only on the order of `values`.
template <class T>
T pairwise_sum(std::span<const T> values) {
    if (values.size() <= 8) {
        T acc{};
        for (const auto& v : values) {
            acc += v;
        }
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct MeanAndError {
    double mean;
    double std_error;
};

inline MeanAndError mean_and_error(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
    const double var = values.size() > 1 ? pairwise_sum(std::span<const double>(sq)) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

/// Runs fn(i) for i in [0, n) over `workers` threads, storing results by
/// index. Output is independent of the worker count.
template <class T, class Fn>
std::vector<T> run_indexed(std::size_t n, unsigned workers, Fn&& fn) {
    std::vector<T> out(n);
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                out[i] = fn(i);
            }
        });
    }
    pool.clear();
    return out;
}

/// Sorted union of two lattices {o1 + k h} and {o2 + k h}, k < n, with the
/// merged index of every lattice point.
struct MergedLattice {
    std::vector<double> times;
    std::vector<std::size_t> index1;
    std::vector<std::size_t> index2;
};

inline MergedLattice merge_lattices(double o1, double o2, double h, std::size_t n) {
    MergedLattice m;
    m.index1.resize(n);
    m.index2.resize(n);
    if (o1 == o2) {
        m.times.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            m.times[k] = o1 + static_cast<double>(k) * h;
            m.index1[k] = m.index2[k] = k;
        }
        return m;
    }
    m.times.reserve(2 * n);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n || j < n) {
        const double ti = i < n ? o1 + static_cast<double>(i) * h : std::numeric_limits<double>::infinity();
        const double tj = j < n ? o2 + static_cast<double>(j) * h : std::numeric_limits<double>::infinity();
        if (ti <= tj) {
            m.index1[i++] = m.times.size();
            m.times.push_back(ti);
        } else {
            m.index2[j++] = m.times.size();
            m.times.push_back(tj);
        }
    }
    return m;
}

inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

/// Grid normalisation K^2 with K^2 * trapz(e^{-Gamma' s}) = 1.
inline double grid_norm_constant(double gamma_prime, std::span<const double> weights, double h) {
    std::vector<double> terms(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        terms[k] = weights[k] * std::exp(-gamma_prime * static_cast<double>(k) * h);
    }
    return 1.0 / pairwise_sum(std::span<const double>(terms));
}

/// Onsets of the two interference integrals. Integration over t1 - tau1
/// starts where both the long-arm photon (dtau1) and the short-arm photon
/// (T) have arrived; likewise for t2 - tau2.
struct Onsets {
    double u0;
    double w0;
};

inline Onsets interference_onsets(const OpticsConfig& c) {
    const double T = c.emission_delay_ps;
    return {std::max(c.interf1.d_tau_ps, T), std::max(c.interf2.d_tau_ps, T)};
}

/// Per-sample interference integral X and direct-term integral D for the
/// Monte Carlo estimator; |A|^2 integrates to D + 2 Re(e^{i phase} X).
struct TwoPathSampler {
    double gamma;
    double h;
    std::size_t n;
    MergedLattice photon_a; ///< emitted at 0, long arm
    MergedLattice photon_b; ///< emitted at T, short arm
    std::vector<double> envelope_u;
    std::vector<double> envelope_w;
    double direct;

    TwoPathSampler(const DerivedRates& rates, const OpticsConfig& config, const TimeGrid& grid)
        : gamma(rates.gamma), h(grid.step()), n(grid.n_points) {
        const double gp = rates.gamma_prime;
        const double T = config.emission_delay_ps;
        const auto [u0, w0] = interference_onsets(config);
        const double oa1 = u0 - config.interf1.d_tau_ps;
        const double ob1 = u0 - T;
        const double oa2 = w0 - config.interf2.d_tau_ps;
        const double ob2 = w0 - T;
        photon_a = merge_lattices(oa1, oa2, h, n);
        photon_b = merge_lattices(ob1, ob2, h, n);

        const auto weights = trapezoid_weights(n, h);
        const double k2 = grid_norm_constant(gp, weights, h);
        envelope_u.resize(n);
        envelope_w.resize(n);
        std::vector<double> single(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = static_cast<double>(k) * h;
            envelope_u[k] = weights[k] * k2 * std::exp(-0.5 * gp * (oa1 + ob1 + 2.0 * s));
            envelope_w[k] = weights[k] * k2 * std::exp(-0.5 * gp * (oa2 + ob2 + 2.0 * s));
            single[k] = weights[k] * k2 * std::exp(-gp * s);
        }
        // Each direct term is a product of two single-photon integrals on
        // their own onset-aligned grids.
        const double norm = pairwise_sum(std::span<const double>(single));
        direct = 2.0 * norm * norm;
    }

    std::complex<double> interference(std::uint64_t seed, std::uint64_t sample) const {
        std::vector<double> phi_a(photon_a.times.size());
        std::vector<double> phi_b(photon_b.times.size());
        NormalStream normals_a(seed, 2 * sample);
        NormalStream normals_b(seed, 2 * sample + 1);
        sample_wiener_at(gamma, photon_a.times, normals_a, phi_a);
        sample_wiener_at(gamma, photon_b.times, normals_b, phi_b);

        // mu(s) = K e^{-Gamma' s/2} e^{-i phi(s)}:
        //   S1 = int a1(u) conj(b1(u)) du,  S2 = int b2(w) conj(a2(w)) dw.
        std::complex<double> s1{};
        std::complex<double> s2{};
        for (std::size_t k = 0; k < n; ++k) {
            const double d1 = phi_b[photon_b.index1[k]] - phi_a[photon_a.index1[k]];
            const double d2 = phi_a[photon_a.index2[k]] - phi_b[photon_b.index2[k]];
            s1 += envelope_u[k] * std::complex<double>(std::cos(d1), std::sin(d1));
            s2 += envelope_w[k] * std::complex<double>(std::cos(d2), std::sin(d2));
        }
        return s1 * s2;
    }
};

} // namespace detail

//---------------------------------------------------------------------------//
// Correlator
//---------------------------------------------------------------------------//

/// Sampled Re <e^{i(phi(lag) - phi(0))}> against e^{-gamma lag}, one report
/// per lag. All lags of one sample come from the same path.
inline std::vector<OracleReport> correlator_check(double gamma, std::span<const double> lags,
                                                  std::size_t n_samples, std::uint64_t seed,
                                                  unsigned workers = 0) {
    if (!(gamma >= 0.0)) {
        throw InvalidParameter("gamma", "dephasing rate must be >= 0");
    }
    if (n_samples < 1000) {
        throw InvalidParameter("samples", "correlator check needs at least 1000 samples");
    }
    std::vector<std::size_t> order(lags.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
        if (!(lags[i] >= 0.0)) {
            throw InvalidParameter("lag", "lags must be >= 0");
        }
    }
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return lags[a] < lags[b]; });
    std::vector<double> sorted(lags.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = lags[order[i]];
    }

    auto per_sample = detail::run_indexed<std::vector<double>>(n_samples, workers, [&](std::size_t s) {
        NormalStream normals(seed, s);
        std::vector<double> phi(sorted.size());
        sample_wiener_at(gamma, sorted, normals, phi);
        std::vector<double> re(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            re[order[i]] = std::cos(phi[i]);
        }
        return re;
    });

    std::vector<OracleReport> reports;
    std::vector<double> column(n_samples);
    for (std::size_t lag = 0; lag < lags.size(); ++lag) {
        for (std::size_t s = 0; s < n_samples; ++s) {
            column[s] = per_sample[s][lag];
        }
        const auto [mean, err] = detail::mean_and_error(column);
        reports.push_back(make_report(mean, err, std::exp(-gamma * lags[lag]), n_samples));
    }
    return reports;
}

/// Weighted least-squares slope of -log(estimate) against lag through the
/// origin, weights (estimate / std_error)^2. Points with non-positive
/// estimates or zero error are skipped.
inline double fit_decay_rate(std::span<const double> lags, std::span<const OracleReport> reports) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const auto& r = reports[i];
        if (r.estimate <= 0.0 || r.std_error <= 0.0) {
            continue;
        }
        const double w = (r.estimate / r.std_error) * (r.estimate / r.std_error);
        num += w * lags[i] * -std::log(r.estimate);
        den += w * lags[i] * lags[i];
    }
    if (den <= 0.0) {
        throw InvalidParameter("lags", "no usable lags for the decay fit");
    }
    return num / den;
}

/// Lags k / (4 gamma), k = 0..12, spanning [0, 3/gamma].
inline std::vector<double> default_correlator_lags(double gamma) {
    std::vector<double> lags;
    for (int k = 0; k <= 12; ++k) {
        lags.push_back(0.25 * k / gamma);
    }
    return lags;
}

//---------------------------------------------------------------------------//
// Coincidence oracles
//---------------------------------------------------------------------------//

/// Monte Carlo estimate of p12 at the given interferometer phase.
inline OracleReport mc_coincidence(const DerivedRates& rates, const OpticsConfig& config, double phase,
                                   const TimeGrid& grid, std::size_t n_samples, std::uint64_t seed,
                                   unsigned workers = 0) {
    check_optics(config);
    check_grid(grid, rates);
    if (n_samples < 2) {
        throw InvalidParameter("samples", "need at least two samples");
    }
    const detail::TwoPathSampler sampler(rates, config, grid);
    const double splitters = 0.5 * coincidence_prefactor(config);
    const std::complex<double> carrier = std::polar(1.0, phase);
    auto values = detail::run_indexed<double>(n_samples, workers, [&](std::size_t s) {
        const auto x = sampler.interference(seed, s);
        return splitters * (sampler.direct + 2.0 * std::real(carrier * x));
    });
    const auto [mean, err] = detail::mean_and_error(values);
    return make_report(mean, err, coincidence_probability(rates, config, phase).p12, n_samples);
}

/// Monte Carlo fringe visibility from p12 at phases 0 and pi, both
/// evaluated on the same trajectories.
inline OracleReport mc_fringe_visibility(const DerivedRates& rates, const OpticsConfig& config,
                                         const TimeGrid& grid, std::size_t n_samples, std::uint64_t seed,
                                         unsigned workers = 0) {
    check_optics(config);
    check_grid(grid, rates);
    if (n_samples < 2) {
        throw InvalidParameter("samples", "need at least two samples");
    }
    const detail::TwoPathSampler sampler(rates, config, grid);
    auto re_x = detail::run_indexed<double>(n_samples, workers, [&](std::size_t s) {
        return std::real(sampler.interference(seed, s));
    });
    const auto [mean, err] = detail::mean_and_error(re_x);
    // (p(0) - p(pi)) / (p(0) + p(pi)) = 2 Re<X> / D
    const double scale = 2.0 / sampler.direct;
    return make_report(scale * mean, scale * err, visibility(rates, config).v, n_samples);
}

/// Deterministic 2-D trapezoid quadrature of the averaged coincidence
/// integrand. Both time axes share the grid step, so the dephasing factor
/// e^{-Gamma|x - d| - Gamma|x|}, x = u - w, is tabulated per diagonal.
inline double quadrature_coincidence(const DerivedRates& rates, const OpticsConfig& config, double phase,
                                     const TimeGrid& grid) {
    check_optics(config);
    check_grid(grid, rates);
    const double gp = rates.gamma_prime;
    const double gamma = rates.gamma;
    const double h = grid.step();
    const std::size_t n = grid.n_points;
    const double T = config.emission_delay_ps;
    const double d = config.interf1.d_tau_ps - config.interf2.d_tau_ps;
    const auto [u0, w0] = detail::interference_onsets(config);

    const auto weights = detail::trapezoid_weights(n, h);
    const double k2 = detail::grid_norm_constant(gp, weights, h);

    std::vector<double> eu(n);
    std::vector<double> ew(n);
    const double base_u = (u0 - config.interf1.d_tau_ps) + (u0 - T);
    const double base_w = (w0 - config.interf2.d_tau_ps) + (w0 - T);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = static_cast<double>(k) * h;
        eu[k] = weights[k] * k2 * std::exp(-0.5 * gp * (base_u + 2.0 * s));
        ew[k] = weights[k] * k2 * std::exp(-0.5 * gp * (base_w + 2.0 * s));
    }
    // dephasing[i - j + n - 1] for x = (u0 - w0) + (i - j) h
    std::vector<double> dephasing(2 * n - 1);
    for (std::size_t m = 0; m < dephasing.size(); ++m) {
        const double x = (u0 - w0) + (static_cast<double>(m) - static_cast<double>(n - 1)) * h;
        dephasing[m] = std::exp(-gamma * std::abs(x - d) - gamma * std::abs(x));
    }
    std::vector<double> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* g = dephasing.data() + i + (n - 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += ew[j] * *(g - j);
        }
        rows[i] = eu[i] * acc;
    }
    const double interference = detail::pairwise_sum(std::span<const double>(rows));

    std::vector<double> single(n);
    for (std::size_t k = 0; k < n; ++k) {
        single[k] = weights[k] * k2 * std::exp(-gp * static_cast<double>(k) * h);
    }
    const double norm = detail::pairwise_sum(std::span<const double>(single));
    const double direct = 2.0 * norm * norm;

    const double splitters = 0.5 * coincidence_prefactor(config);
    return splitters * (direct + 2.0 * interference * std::cos(phase));
}

/// (p(0) - p(pi)) / (p(0) + p(pi)) from a phase -> p12 table.
inline double extract_visibility_from_fringe(const std::map<double, double>& p_at_phase) {
    const auto zero = p_at_phase.find(0.0);
    const auto pi = p_at_phase.find(std::numbers::pi);
    if (zero == p_at_phase.end() || pi == p_at_phase.end()) {
        throw InvalidParameter("p_at_phase", "phases 0 and pi are both required");
    }
    const double sum = zero->second + pi->second;
    if (sum == 0.0) {
        throw DegenerateFringe("p12 vanishes at both fringe extrema");
    }
    return (zero->second - pi->second) / sum;
}

} // namespace timebin
