#pragma once

#include <random>
#include <string>
#include <vector>

#include "thzbf/constants.hpp"
#include "thzbf/irs.hpp"

namespace thzbf {

// The six path angles of an IRS-assisted link, in radians.
struct IrsAngles
{
    double bs_los;    // phi_B,H: BS departure toward the user
    double user_los;  // phi_U,H: user arrival from the BS
    double bs_irs;    // phi_B,M: BS departure toward the IRS
    double irs_bs;    // phi_R,M: IRS arrival from the BS
    double irs_user;  // phi_R,N: IRS departure toward the user
    double user_irs;  // phi_U,N: user arrival from the IRS
};

// Grid indices into the N-point sine grid, same order as IrsAngles.
struct IrsGridIndices
{
    int bs_los;
    int user_los;
    int bs_irs;
    int irs_bs;
    int irs_user;
    int user_irs;
    bool operator==(const IrsGridIndices&) const = default;
};

// BS, user and IRS are lambda/2 ULAs with N elements, N = 3^S. Path angles
// are measured from each array's broadside. Every terminal uses the same
// response-vector form a(phi) for transmit and receive; the IRS sees the
// BS at phi_R,M and the user at phi_R,N + pi.
class IrsLink
{
public:
    IrsLink(int n, IrsAngles angles, cplx gain_los, cplx gain_bs_irs, cplx gain_irs_user);
    static IrsLink on_grid(int n, IrsGridIndices idx, cplx gain_los, cplx gain_bs_irs, cplx gain_irs_user);

    int n() const { return n_; }
    int depth() const { return depth_; }
    const IrsAngles& angles() const { return angles_; }
    const ArrayGeometry& surface() const { return surface_; }

    // Forward link (BS transmits): H_LoS, M (BS -> IRS), N (IRS -> user).
    const CMatrix& h_los() const { return h_los_; }
    const CMatrix& m() const { return m_; }
    const CMatrix& n_mat() const { return nm_; }
    // Reverse link (user transmits).
    const CMatrix& h_los_rev() const { return h_los_rev_; }
    const CMatrix& m_rev() const { return m_rev_; }
    const CMatrix& n_rev() const { return n_rev_; }
    // Effective channels N Theta M + H_LoS in each direction.
    CMatrix forward(const IrsState& irs) const;
    CMatrix reverse(const IrsState& irs) const;
    // Return-mode round trips BS -> IRS -> BS and user -> IRS -> user.
    CMatrix bs_round_trip(const IrsState& irs) const;
    CMatrix user_round_trip(const IrsState& irs) const;

    IrsScenario scenario(double power_w, double noise_var_w, int n_streams) const;

private:
    int n_;
    int depth_;
    IrsAngles angles_;
    ArrayGeometry surface_;
    CMatrix h_los_, m_, nm_;
    CMatrix h_los_rev_, m_rev_, n_rev_;
};

// 2N + 1 codewords: 0 is the IRS switched off, i = 1..2N is the direct
// codeword for the sine difference 2(i - N)/N.
std::vector<IrsState> irs_codeword_set(const ArrayGeometry& surface, int n);
double irs_codeword_sine_difference(int n, int index);

struct IrsTracePoint
{
    int phase;
    int slot;
    int irs_codeword; // 0 off, 1..2N direct set, 2N+1+k return mode toward grid sine k
    int tx_beam;      // tree node id (root 0, breadth first), -1 omni
    int rx_beam;
    double power;
};

struct IrsTrainingOutcome
{
    IrsAngles angles;
    IrsGridIndices indices;
    int irs_codeword;
    int tests_used;
    std::vector<IrsTracePoint> trace;
};

struct IrsProtocolOptions
{
    double noise_var = 0.0;
    // A pulse must reach this multiple of its interval's median power.
    double pulse_factor = 10.0;
};

// Wide-beam/IRS-sweep protocol: 18N + 12 log_3 N - 3 tests. Only the sine
// difference at the IRS is observable, so phi_R,M is taken from the known
// BS-IRS deployment bearing and phi_R,N follows from the detected codeword.
IrsTrainingOutcome cooperative_train(const IrsLink& link, double known_irs_bs_angle, const IrsProtocolOptions& opt,
                                     std::mt19937_64& rng);

// Omni sweeps, return-mode IRS sweeps, direct-mode sweeps: 6N tests.
IrsTrainingOutcome primary_train(const IrsLink& link, const IrsProtocolOptions& opt, std::mt19937_64& rng);

long long cooperative_cost(int n);
long long primary_cost(int n);
// N^2 + N^4.
long long irs_exhaustive_cost(int n);

// Nearest point of the N-point midpoint sine grid.
int nearest_grid_index(int n, double angle);

} // namespace thzbf
