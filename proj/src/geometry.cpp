#include "thzbf/geometry.hpp"

#include <cmath>

#include "thzbf/errors.hpp"
#include "thzbf/kernels.hpp"

namespace thzbf {

namespace {

double default_spacing(double given, double wavelength_m)
{
    return given > 0.0 ? given : wavelength_m / 2.0;
}

void check_common(const char* op, int count, double wavelength_m)
{
    if (count < 1)
        throw DomainError(op, "element count must be at least 1");
    if (!(wavelength_m > 0.0))
        throw DomainError(op, "wavelength must be positive");
}

int hex_row_length(int rings, int v) { return 2 * rings + 1 - std::abs(v); }

} // namespace

Direction::Direction(double azimuth, double elevation)
    : azimuth_(wrap_two_pi(azimuth)), elevation_(elevation)
{
    if (!std::isfinite(azimuth))
        throw DomainError("Direction", "azimuth must be finite");
    if (!(elevation >= 0.0 && elevation <= kPi))
        throw DomainError("Direction", "elevation must lie in [0, pi]");
}

ArrayGeometry ArrayGeometry::ula(int n, double wavelength_m, double spacing_m)
{
    check_common("ArrayGeometry::ula", n, wavelength_m);
    ArrayGeometry g;
    g.kind_ = ArrayKind::ULA;
    g.size_ = n;
    g.count_a_ = n;
    g.wavelength_ = wavelength_m;
    g.spacing_a_ = default_spacing(spacing_m, wavelength_m);
    if (spacing_m < 0.0)
        throw DomainError("ArrayGeometry::ula", "spacing must be positive");
    return g;
}

ArrayGeometry ArrayGeometry::urpa(int ny, int nz, double wavelength_m, double dy_m, double dz_m)
{
    check_common("ArrayGeometry::urpa", std::min(ny, nz), wavelength_m);
    if (dy_m < 0.0 || dz_m < 0.0)
        throw DomainError("ArrayGeometry::urpa", "spacing must be positive");
    ArrayGeometry g;
    g.kind_ = ArrayKind::URPA;
    g.size_ = ny * nz;
    g.count_a_ = ny;
    g.count_b_ = nz;
    g.wavelength_ = wavelength_m;
    g.spacing_a_ = default_spacing(dy_m, wavelength_m);
    g.spacing_b_ = default_spacing(dz_m, wavelength_m);
    return g;
}

ArrayGeometry ArrayGeometry::uhpa(int rings, double wavelength_m, double dx_m)
{
    if (rings < 0)
        throw DomainError("ArrayGeometry::uhpa", "ring count must be non-negative");
    check_common("ArrayGeometry::uhpa", 1, wavelength_m);
    if (dx_m < 0.0)
        throw DomainError("ArrayGeometry::uhpa", "spacing must be positive");
    ArrayGeometry g;
    g.kind_ = ArrayKind::UHPA;
    g.count_a_ = rings;
    g.size_ = 1 + 3 * rings * (rings + 1); // 1 + sum 6v
    g.wavelength_ = wavelength_m;
    g.spacing_a_ = default_spacing(dx_m, wavelength_m);
    g.spacing_b_ = std::sqrt(3.0) / 2.0 * g.spacing_a_;
    return g;
}

ArrayGeometry ArrayGeometry::ucpa(int circles, double wavelength_m, std::vector<double> radii_m)
{
    if (circles < 0)
        throw DomainError("ArrayGeometry::ucpa", "circle count must be non-negative");
    check_common("ArrayGeometry::ucpa", 1, wavelength_m);
    if (radii_m.empty()) {
        for (int c = 1; c <= circles; ++c)
            radii_m.push_back(c * wavelength_m / 2.0);
    }
    if (static_cast<int>(radii_m.size()) != circles)
        throw DomainError("ArrayGeometry::ucpa", "need one radius per circle");
    for (std::size_t i = 0; i < radii_m.size(); ++i) {
        if (!(radii_m[i] > 0.0) || (i > 0 && !(radii_m[i] > radii_m[i - 1])))
            throw DomainError("ArrayGeometry::ucpa", "radii must be positive and increasing");
    }
    ArrayGeometry g;
    g.kind_ = ArrayKind::UCPA;
    g.count_a_ = circles;
    g.size_ = 1 + 3 * circles * (circles + 1); // 1 + sum 6c
    g.wavelength_ = wavelength_m;
    g.radii_ = std::move(radii_m);
    return g;
}

std::vector<Eigen::Vector3d> ArrayGeometry::element_positions() const
{
    std::vector<Eigen::Vector3d> pos;
    pos.reserve(size_);
    switch (kind_) {
    case ArrayKind::ULA:
        for (int m = 0; m < count_a_; ++m)
            pos.emplace_back(m * spacing_a_, 0.0, 0.0);
        break;
    case ArrayKind::URPA:
        for (int m = 0; m < count_a_; ++m)
            for (int n = 0; n < count_b_; ++n)
                pos.emplace_back(0.0, m * spacing_a_, n * spacing_b_);
        break;
    case ArrayKind::UHPA: {
        const int rings = count_a_;
        for (int v = rings; v >= -rings; --v) {
            const int len = hex_row_length(rings, v);
            for (int i = 0; i < len; ++i)
                pos.emplace_back((i - (len - 1) / 2.0) * spacing_a_, v * spacing_b_, 0.0);
        }
        break;
    }
    case ArrayKind::UCPA:
        pos.emplace_back(0.0, 0.0, 0.0);
        for (int c = 1; c <= count_a_; ++c) {
            const int count = 6 * c;
            const double r = radii_[c - 1];
            for (int i = 0; i < count; ++i) {
                const double a = kTwoPi * i / count;
                pos.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
            }
        }
        break;
    }
    return pos;
}

double ArrayGeometry::aperture() const
{
    switch (kind_) {
    case ArrayKind::ULA:
        return (count_a_ - 1) * spacing_a_;
    case ArrayKind::URPA:
        return std::max((count_a_ - 1) * spacing_a_, (count_b_ - 1) * spacing_b_);
    case ArrayKind::UHPA:
        return 2.0 * count_a_ * spacing_a_;
    case ArrayKind::UCPA:
        return count_a_ == 0 ? 0.0 : 2.0 * radii_.back();
    }
    return 0.0;
}

CVector response_vector(const ArrayGeometry& g, const Direction& dir, Orientation orientation)
{
    const double sign = orientation == Orientation::Transmit ? 1.0 : -1.0;
    const double k = kTwoPi / g.wavelength();
    const double phi = dir.azimuth();
    const double theta = dir.elevation();
    CVector a(g.size());
    int idx = 0;
    auto put = [&](double phase) { a(idx++) = std::polar(1.0, sign * phase); };

    switch (g.kind()) {
    case ArrayKind::ULA: {
        const double step = k * g.spacing() * std::sin(phi);
        for (int m = 0; m < g.primary_count(); ++m)
            put(m * step);
        break;
    }
    case ArrayKind::URPA: {
        const double uy = k * g.spacing() * std::sin(theta) * std::sin(phi);
        const double uz = k * g.secondary_spacing() * std::cos(theta);
        for (int m = 0; m < g.primary_count(); ++m)
            for (int n = 0; n < g.secondary_count(); ++n)
                put(m * uy + n * uz);
        break;
    }
    case ArrayKind::UHPA: {
        const int rings = g.primary_count();
        const double ux = k * g.spacing() * std::sin(theta) * std::cos(phi);
        const double uy = k * g.secondary_spacing() * std::sin(theta) * std::sin(phi);
        for (int v = rings; v >= -rings; --v) {
            const int len = hex_row_length(rings, v);
            for (int i = 0; i < len; ++i)
                put((i - (len - 1) / 2.0) * ux + v * uy);
        }
        break;
    }
    case ArrayKind::UCPA: {
        put(0.0);
        const double st = std::sin(theta);
        for (int c = 1; c <= g.primary_count(); ++c) {
            const int count = 6 * c;
            const double kr = k * g.radii()[c - 1] * st;
            for (int i = 0; i < count; ++i)
                put(kr * std::cos(phi - kTwoPi * i / count));
        }
        break;
    }
    }
    return a / std::sqrt(static_cast<double>(g.size()));
}

CVector steering_vector_sine(int n, double sine, double spacing_over_lambda)
{
    if (n < 1)
        throw DomainError("steering_vector", "element count must be at least 1");
    CVector a(n);
    const double step = kTwoPi * spacing_over_lambda * sine;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(scale, m * step);
    return a;
}

CVector steering_vector(int n, double phi, double spacing_over_lambda)
{
    return steering_vector_sine(n, std::sin(phi), spacing_over_lambda);
}

ElementPattern isotropic_pattern()
{
    return [](const Direction&) { return 1.0; };
}

ElementPattern cos2_pattern()
{
    return [](const Direction& d) {
        const double th = d.elevation();
        if (th > kPi / 2)
            return 0.0;
        const double c = std::cos(th);
        return c * c;
    };
}

double directivity(const ElementPattern& pattern, QuadratureGrid grid)
{
    const double integral = kernels::pattern_integral(pattern, grid.n_azimuth, grid.n_elevation);
    if (!(integral > 0.0))
        throw DomainError("element_gain", "pattern integrates to zero; directivity undefined");
    return 4.0 * kPi / integral;
}

double element_gain(const ElementPattern& pattern, const Direction& dir, double efficiency, QuadratureGrid grid)
{
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw DomainError("element_gain", "efficiency must lie in [0, 1]");
    const double f = pattern(dir);
    if (f < 0.0)
        throw DomainError("element_gain", "pattern must be non-negative");
    return efficiency * f * directivity(pattern, grid);
}

double hpbw_directivity(double theta3db_x, double theta3db_y)
{
    if (!(theta3db_x > 0.0 && theta3db_x < kPi && theta3db_y > 0.0 && theta3db_y < kPi))
        throw DomainError("hpbw_directivity", "beamwidths must lie in (0, pi)");
    return 4.0 * kPi / (theta3db_x * theta3db_y);
}

double antenna_gain_db(double element_gain_db, int n_elements)
{
    if (n_elements < 1)
        throw DomainError("antenna_gain_db", "element count must be at least 1");
    return element_gain_db + 10.0 * std::log10(static_cast<double>(n_elements));
}

double far_field_distance(double aperture_m, double wavelength_m)
{
    if (aperture_m < 0.0 || !(wavelength_m > 0.0))
        throw DomainError("far_field_distance", "aperture must be >= 0 and wavelength > 0");
    return 2.0 * aperture_m * aperture_m / wavelength_m;
}

double far_field_distance(const ArrayGeometry& geometry)
{
    return far_field_distance(geometry.aperture(), geometry.wavelength());
}

bool is_far_field(const ArrayGeometry& geometry, double distance_m)
{
    return distance_m > far_field_distance(geometry);
}

} // namespace thzbf
