#pragma once

#include <optional>
#include <vector>

#include "thzbf/constants.hpp"

namespace thzbf {

class Codeword
{
public:
    // Validates unit norm (and constant modulus when flagged) to 1e-12.
    Codeword(CVector weights, bool constant_modulus, std::optional<double> steering_sine = std::nullopt);

    // lambda/2 ULA steering codeword pointed at sine value s.
    static Codeword steering(int n_antennas, double sine);

    const CVector& weights() const { return weights_; }
    int size() const { return static_cast<int>(weights_.size()); }
    bool constant_modulus() const { return constant_modulus_; }
    // Sine of the pointing direction, when the codeword has one.
    std::optional<double> steering_sine() const { return steering_sine_; }

private:
    CVector weights_;
    bool constant_modulus_;
    std::optional<double> steering_sine_;
};

class Codebook
{
public:
    explicit Codebook(std::vector<Codeword> codewords);

    int size() const { return static_cast<int>(codewords_.size()); }
    int n_antennas() const { return codewords_.front().size(); }
    const Codeword& operator[](int i) const { return codewords_.at(i); }
    const std::vector<Codeword>& codewords() const { return codewords_; }
    // Codewords as columns.
    CMatrix matrix() const;

private:
    std::vector<Codeword> codewords_;
};

// |w^H a(psi)| for the lambda/2 ULA with as many elements as the codeword.
double array_factor(const Codeword& codeword, double probe_angle);

// |sin(N pi/2 x) / (N sin(pi/2 x))|, x = sin(psi) - sin(phi); 1 at x = 0.
double array_factor_closed_form(int n_antennas, double phi, double psi);
double array_factor_closed_form_sine(int n_antennas, double sine_difference);

struct AngleInterval
{
    double lo;
    double hi;
    double width() const { return hi - lo; }
};

// Maximal intervals of [-pi/2, pi/2] where array_factor >= rho. Dense scan at
// pi/2^14 with bisection on every boundary.
std::vector<AngleInterval> beam_coverage(const Codeword& codeword, double rho);
double total_width(const std::vector<AngleInterval>& intervals);
inline constexpr double kHalfPowerThreshold = 0.70710678118654752440;

// Worst-case gain of a uniform steering codebook with N in {N_a, 2N_a}.
double coverage_threshold(int n_antennas, int n_beams);

// Beams centred on the midpoints of n_beams equal sine cells over [-1, 1).
Codebook steering_codebook(int n_antennas, int n_beams);
double steering_sine(int n_beams, int index);

// M-ary beam tree. Stage s = 1..S holds M^s codewords; codeword i of stage s
// covers the sine cell [-1 + 2i/M^s, -1 + 2(i+1)/M^s). Wide beams use the
// leading max(1, N_a / M^(S-s)) elements steered to the cell centre.
class HierarchicalCodebook
{
public:
    HierarchicalCodebook(int m_ary, int depth, int n_antennas);

    int m_ary() const { return m_; }
    int depth() const { return depth_; }
    int n_antennas() const { return n_antennas_; }
    int leaf_count() const { return stages_.back().size(); }

    const Codebook& stage(int s) const;
    const Codeword& node(int s, int index) const { return stage(s)[index]; }
    // Gain at the edge of a stage-s cell; the coverage threshold of that stage.
    double stage_threshold(int s) const;
    std::vector<int> children(int s, int index) const;
    AngleInterval sine_cell(int s, int index) const;
    int active_elements(int s) const;

private:
    int m_;
    int depth_;
    int n_antennas_;
    std::vector<Codebook> stages_;
    std::vector<double> thresholds_;
};

// log2 det(I + P/(sigma^2 N_s) H F F^H H^H). Requires ||F||_F^2 = N_s.
double spectral_efficiency(const CMatrix& h_eff, const CMatrix& f, double power_w, double noise_var_w,
                           int n_streams);

} // namespace thzbf
