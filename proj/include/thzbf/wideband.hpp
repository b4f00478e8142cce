#pragma once

#include <span>
#include <vector>

#include "thzbf/constants.hpp"

namespace thzbf {

struct WidebandSetup
{
    double carrier_hz;
    double bandwidth_hz;
    int n_antennas;
    double spacing_m;
    double symbol_period_s;

    // lambda_c / 2 spacing at the carrier.
    static WidebandSetup half_wavelength(double carrier_hz, double bandwidth_hz, int n_antennas,
                                         double symbol_period_s);
    void validate() const;
    // 2 d_a f_c / c; 1 for half-wavelength spacing.
    double spacing_factor() const;
};

// tau_m = m d_a sin(phi) / c for m = 0..N_a-1.
std::vector<double> spatial_delays(const WidebandSetup& setup, double aoa);

struct WidebandCheck
{
    double ratio; // |tau_max| / T_s
    bool wideband;
};

inline constexpr double kDefaultWidebandThreshold = 0.1;

WidebandCheck is_spatially_wideband(const WidebandSetup& setup, double aoa,
                                    double threshold = kDefaultWidebandThreshold);

// alpha s(t - tau_m) e^{-j 2 pi m d sin(phi) / lambda} for element m
// (0-based), s a rectangular-pulse symbol stream starting at t = 0. With
// `ttd_compensation` the delay is cancelled and only the phase remains.
cplx delayed_baseband_signal(const WidebandSetup& setup, double aoa, std::span<const cplx> symbols,
                             int element_index, double t, cplx alpha = {1.0, 0.0}, bool ttd_compensation = false);

// Normalised gain at frequency f of a codeword steered to phi at the carrier.
double squint_gain(const WidebandSetup& setup, double codeword_angle, double probe_angle, double frequency_hz);

// arcsin((f / f_c) sin psi); BeamSplitError when no real angle exists.
double squint_direction(double psi, double frequency_hz, double carrier_hz);

double effective_wideband_gain(const WidebandSetup& setup, double phi_max);
inline double squint_loss(const WidebandSetup& setup, double phi_max)
{
    return 1.0 - effective_wideband_gain(setup, phi_max);
}

struct SquintSample
{
    double frequency_hz;
    double psi_rad;
    double gain;
};

// Beam pattern of the phi-steered codeword on a frequency x angle grid.
std::vector<SquintSample> squint_pattern(const WidebandSetup& setup, double codeword_angle,
                                         std::span<const double> frequencies, std::span<const double> probes);

} // namespace thzbf
