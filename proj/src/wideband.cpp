#include "thzbf/wideband.hpp"

#include <cmath>

#include "thzbf/beamforming.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/geometry.hpp"
#include "thzbf/kernels.hpp"

namespace thzbf {

WidebandSetup WidebandSetup::half_wavelength(double carrier_hz, double bandwidth_hz, int n_antennas,
                                             double symbol_period_s)
{
    WidebandSetup s{carrier_hz, bandwidth_hz, n_antennas, wavelength(carrier_hz) / 2.0, symbol_period_s};
    s.validate();
    return s;
}

void WidebandSetup::validate() const
{
    if (!(carrier_hz > 0.0 && bandwidth_hz > 0.0 && spacing_m > 0.0 && symbol_period_s > 0.0) || n_antennas < 1)
        throw DomainError("WidebandSetup", "all parameters must be positive");
    if (!(bandwidth_hz < 2.0 * carrier_hz))
        throw DomainError("WidebandSetup", "bandwidth must be below twice the carrier");
}

double WidebandSetup::spacing_factor() const { return 2.0 * spacing_m * carrier_hz / kSpeedOfLight; }

std::vector<double> spatial_delays(const WidebandSetup& setup, double aoa)
{
    setup.validate();
    std::vector<double> d(setup.n_antennas);
    const double step = setup.spacing_m * std::sin(aoa) / kSpeedOfLight;
    for (int m = 0; m < setup.n_antennas; ++m)
        d[m] = m * step;
    return d;
}

WidebandCheck is_spatially_wideband(const WidebandSetup& setup, double aoa, double threshold)
{
    setup.validate();
    if (!(threshold > 0.0))
        throw DomainError("is_spatially_wideband", "threshold must be positive");
    const double tau_max = (setup.n_antennas - 1) * setup.spacing_m * std::abs(std::sin(aoa)) / kSpeedOfLight;
    const double ratio = tau_max / setup.symbol_period_s;
    return {ratio, ratio >= threshold};
}

cplx delayed_baseband_signal(const WidebandSetup& setup, double aoa, std::span<const cplx> symbols,
                             int element_index, double t, cplx alpha, bool ttd_compensation)
{
    setup.validate();
    if (element_index < 0 || element_index >= setup.n_antennas)
        throw DomainError("delayed_baseband_signal", "element index out of range");
    const double tau = ttd_compensation ? 0.0 : element_index * setup.spacing_m * std::sin(aoa) / kSpeedOfLight;
    const double local = t - tau;
    // Rectangular pulse on [0, T_s): symbol k occupies [k T_s, (k+1) T_s).
    cplx s(0.0, 0.0);
    if (local >= 0.0) {
        const auto k = static_cast<std::size_t>(std::floor(local / setup.symbol_period_s));
        if (k < symbols.size())
            s = symbols[k];
    }
    const double phase = -kTwoPi * element_index * setup.spacing_m * std::sin(aoa) / wavelength(setup.carrier_hz);
    return alpha * s * std::polar(1.0, phase);
}

double squint_gain(const WidebandSetup& setup, double codeword_angle, double probe_angle, double frequency_hz)
{
    setup.validate();
    const double half = setup.bandwidth_hz / 2.0;
    const double slack = 1e-9 * setup.carrier_hz;
    if (frequency_hz < setup.carrier_hz - half - slack || frequency_hz > setup.carrier_hz + half + slack)
        throw DomainError("squint_gain", "frequency outside the band");
    const double xi = frequency_hz / setup.carrier_hz;
    const double x = setup.spacing_factor() * (xi * std::sin(probe_angle) - std::sin(codeword_angle));
    return array_factor_closed_form_sine(setup.n_antennas, x);
}

double squint_direction(double psi, double frequency_hz, double carrier_hz)
{
    if (!(frequency_hz > 0.0 && carrier_hz > 0.0))
        throw DomainError("squint_direction", "frequencies must be positive");
    if (frequency_hz == carrier_hz && std::abs(psi) <= kPi / 2)
        return psi;
    const double arg = frequency_hz / carrier_hz * std::sin(psi);
    if (std::abs(arg) > 1.0)
        throw BeamSplitError("squint_direction", "|(f/f_c) sin psi| exceeds 1; no real steering angle");
    return std::asin(arg);
}

double effective_wideband_gain(const WidebandSetup& setup, double phi_max)
{
    setup.validate();
    const double x = setup.spacing_factor() * setup.bandwidth_hz / (2.0 * setup.carrier_hz) * std::sin(phi_max);
    return array_factor_closed_form_sine(setup.n_antennas, x);
}

std::vector<SquintSample> squint_pattern(const WidebandSetup& setup, double codeword_angle,
                                         std::span<const double> frequencies, std::span<const double> probes)
{
    setup.validate();
    const double d_over_lambda = setup.spacing_m / wavelength(setup.carrier_hz);
    const CVector w = steering_vector(setup.n_antennas, codeword_angle, d_over_lambda);
    const auto gains = kernels::squint_sweep(w, setup.carrier_hz, frequencies, probes, d_over_lambda);
    std::vector<SquintSample> out;
    out.reserve(gains.size());
    for (std::size_t fi = 0; fi < frequencies.size(); ++fi)
        for (std::size_t pi = 0; pi < probes.size(); ++pi)
            out.push_back({frequencies[fi], probes[pi], gains[fi * probes.size() + pi]});
    return out;
}

} // namespace thzbf
