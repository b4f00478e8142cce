#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "thzbf/constants.hpp"

namespace thzbf {

enum class ArrayKind { ULA, URPA, UHPA, UCPA };

// Phase sign of a response vector: e^{+j..} for transmit, e^{-j..} for receive.
enum class Orientation { Transmit, Receive };

/// Propagation direction. Azimuth is wrapped into [0, 2pi); elevation must
/// lie in [0, pi]. For a ULA only the azimuth is used and it is measured from
/// the array broadside, so negative angles are accepted and wrapped.
class Direction
{
public:
    explicit Direction(double azimuth, double elevation = kPi / 2);

    double azimuth() const { return azimuth_; }
    double elevation() const { return elevation_; }

private:
    double azimuth_;
    double elevation_;
};

/// Element layout of an antenna array.
///
/// Element storage order:
///   ULA  - along the axis, first element at the origin
///   URPA - row-major over (m, n), m along y and n along z
///   UHPA - rows from v = V (top) down to v = -V, each row left to right
///   UCPA - center element, then circles inner to outer, each circle
///          counterclockwise from the +x axis
class ArrayGeometry
{
public:
    // A spacing of 0 selects lambda/2.
    static ArrayGeometry ula(int n, double wavelength_m, double spacing_m = 0.0);
    static ArrayGeometry urpa(int ny, int nz, double wavelength_m, double dy_m = 0.0, double dz_m = 0.0);
    static ArrayGeometry uhpa(int rings, double wavelength_m, double dx_m = 0.0);
    // Empty radii place circle c at radius c * lambda/2.
    static ArrayGeometry ucpa(int circles, double wavelength_m, std::vector<double> radii_m = {});

    ArrayKind kind() const { return kind_; }
    int size() const { return size_; }
    double wavelength() const { return wavelength_; }

    // N_x (ULA), N_y (URPA), V (UHPA), C (UCPA)
    int primary_count() const { return count_a_; }
    // N_z for URPA, 1 otherwise
    int secondary_count() const { return count_b_; }
    // d_x (ULA, UHPA) or d_y (URPA)
    double spacing() const { return spacing_a_; }
    // d_z for URPA, sqrt(3)/2 d_x for UHPA
    double secondary_spacing() const { return spacing_b_; }
    const std::vector<double>& radii() const { return radii_; }

    // Element coordinates in meters, in storage order.
    std::vector<Eigen::Vector3d> element_positions() const;

    // Largest one-dimensional extent used for the Rayleigh distance.
    double aperture() const;

private:
    ArrayGeometry() = default;

    ArrayKind kind_ = ArrayKind::ULA;
    int size_ = 1;
    int count_a_ = 1;
    int count_b_ = 1;
    double spacing_a_ = 0.0;
    double spacing_b_ = 0.0;
    double wavelength_ = 0.0;
    std::vector<double> radii_;
};

// Unit-norm array response vector.
CVector response_vector(const ArrayGeometry& geometry, const Direction& dir,
                        Orientation orientation = Orientation::Transmit);

// lambda/2-style ULA steering vector in the unified form
// (1/sqrt(N)) [1, e^{j 2pi s sin(phi)}, ...] with s = spacing / lambda.
CVector steering_vector(int n, double phi, double spacing_over_lambda = 0.5);

// Same, parameterized directly by the sine of the angle.
CVector steering_vector_sine(int n, double sine, double spacing_over_lambda = 0.5);

// Normalized radiation pattern F(dir) >= 0. Must be safe to call concurrently.
using ElementPattern = std::function<double(const Direction&)>;

ElementPattern isotropic_pattern();
// cos^2(theta) on the upper hemisphere, zero below.
ElementPattern cos2_pattern();

struct QuadratureGrid
{
    int n_azimuth = 720;
    int n_elevation = 360;
};

// Maximum directivity 4pi / integral(F sin theta) by the trapezoidal rule.
double directivity(const ElementPattern& pattern, QuadratureGrid grid = {});

// varsigma * F(dir) * D
double element_gain(const ElementPattern& pattern, const Direction& dir, double efficiency,
                    QuadratureGrid grid = {});

// 4pi / (theta_x theta_y), beamwidths in radians.
double hpbw_directivity(double theta3db_x, double theta3db_y);

double antenna_gain_db(double element_gain_db, int n_elements);

double far_field_distance(double aperture_m, double wavelength_m);
double far_field_distance(const ArrayGeometry& geometry);
bool is_far_field(const ArrayGeometry& geometry, double distance_m);

} // namespace thzbf
