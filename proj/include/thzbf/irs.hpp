#pragma once

#include <optional>
#include <vector>

#include "thzbf/constants.hpp"
#include "thzbf/geometry.hpp"

namespace thzbf {

// Reflection state Theta = beta diag(e^{-j theta_i}).
class IrsState
{
public:
    IrsState(std::vector<double> phases, double amplitude = 1.0);
    static IrsState off(int n_elements);

    const std::vector<double>& phases() const { return phases_; }
    double amplitude() const { return amplitude_; }
    int size() const { return static_cast<int>(phases_.size()); }
    // Diagonal of Theta.
    CVector reflection() const;
    CMatrix matrix() const;

private:
    std::vector<double> phases_;
    double amplitude_;
};

struct IrsScenario
{
    CMatrix h_los; // N_r x N_t
    CMatrix m;     // N_IRS x N_t, BS to IRS
    CMatrix n;     // N_r x N_IRS, IRS to user
    double power_w = 1.0;
    double noise_var_w = 1.0;
    int n_streams = 1;

    void validate() const;
    int n_irs() const { return static_cast<int>(m.rows()); }
};

// N Theta M + H_LoS.
CMatrix effective_channel(const IrsScenario& scenario, const IrsState& irs);

struct AoOptions
{
    int max_iters = 50;
    double tol = 1e-9;
    int sweeps = 2; // coordinate sweeps over the IRS per outer iteration
    std::optional<IrsState> initial;
};

struct AoResult
{
    CMatrix f;
    IrsState irs;
    std::vector<double> trace; // objective after initialisation and every iteration
    int iterations;
};

// Top-N_s right singular vectors of H, one unit-norm column per stream.
CMatrix eigen_precoder(const CMatrix& h, int n_streams);

// Spectral efficiency of `irs` with the eigen precoder of its effective channel.
double irs_objective(const IrsScenario& scenario, const IrsState& irs);

// Alternates the eigen precoder with closed-form per-element phase updates.
// Phases start at zero unless `initial` is given; the amplitude is held.
AoResult ao_joint_beamforming(const IrsScenario& scenario, const AoOptions& options = {});

// Retro-reflection toward phi_in + pi: theta_n = 2 pi n (d/lambda) 2 sin(phi_in).
IrsState theta_return(double phi_in, const ArrayGeometry& irs, double amplitude = 1.0);

// Anomalous reflection phi_in -> phi_out:
// theta_n = 2 pi n (d/lambda) (sin(phi_in) - sin(phi_out)).
IrsState theta_direct(double phi_in, double phi_out, const ArrayGeometry& irs, double amplitude = 1.0);

// Direct-mode codeword for a sine difference sin(phi_in) - sin(phi_out).
IrsState theta_direct_sine(double sine_difference, const ArrayGeometry& irs, double amplitude = 1.0);

} // namespace thzbf
