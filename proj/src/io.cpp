#include "thzbf/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(line);
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

std::vector<std::string> tokens_of(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t)
        out.push_back(t);
    return out;
}

double to_double(const std::string& s, const std::string& source, int line)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError(source, line, "expected a number, got '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& source, int line)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError(source, line, "expected an integer, got '" + s + "'");
    }
}

void write_weights(std::ostream& out, const CVector& w)
{
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (i > 0)
            out << ',';
        out << format_double(w(i).real()) << ',' << format_double(w(i).imag());
    }
}

bool is_constant_modulus(const CVector& w)
{
    const double target = 1.0 / std::sqrt(static_cast<double>(w.size()));
    return (w.cwiseAbs().array() - target).abs().maxCoeff() <= 1e-12;
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_double(value)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

CsvWriter& CsvWriter::cell(const std::string& value)
{
    if (in_row_ == columns_)
        throw DomainError("CsvWriter", "too many cells in row");
    out_ << (in_row_ ? "," : "") << value;
    ++in_row_;
    return *this;
}

void CsvWriter::end_row()
{
    if (in_row_ != columns_)
        throw DomainError("CsvWriter", "row has the wrong number of cells");
    out_ << '\n';
    in_row_ = 0;
}

void write_training_trace(std::ostream& out, const TrainingOutcome& outcome)
{
    CsvWriter csv(out, {"stage", "tx_index", "rx_index", "power"});
    for (const auto& slot : outcome.trace)
        for (const auto& p : slot) {
            csv.cell(p.stage).cell(p.tx_index).cell(p.rx_index).cell(p.power);
            csv.end_row();
        }
}

void write_irs_trace(std::ostream& out, const IrsTrainingOutcome& outcome)
{
    CsvWriter csv(out, {"phase", "slot", "irs_codeword", "tx_beam", "rx_beam", "power"});
    for (const auto& p : outcome.trace) {
        csv.cell(p.phase).cell(p.slot).cell(p.irs_codeword).cell(p.tx_beam).cell(p.rx_beam).cell(p.power);
        csv.end_row();
    }
}

void write_squint_csv(std::ostream& out, std::span<const SquintSample> samples)
{
    CsvWriter csv(out, {"f_hz", "psi_rad", "gain"});
    for (const auto& s : samples) {
        csv.cell(s.frequency_hz).cell(s.psi_rad).cell(s.gain);
        csv.end_row();
    }
}

void write_codebook(std::ostream& out, const Codebook& codebook)
{
    for (const auto& cw : codebook.codewords()) {
        write_weights(out, cw.weights());
        out << '\n';
    }
}

Codebook read_codebook(std::istream& in)
{
    std::vector<Codeword> cws;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        const auto cells = split(line, ',');
        if (cells.empty() || cells.size() % 2 != 0)
            throw SchemaError("codebook", lineno, "expected an even number of re,im values");
        CVector w(static_cast<Eigen::Index>(cells.size() / 2));
        for (std::size_t i = 0; i < cells.size(); i += 2)
            w(static_cast<Eigen::Index>(i / 2)) =
                cplx(to_double(cells[i], "codebook", lineno), to_double(cells[i + 1], "codebook", lineno));
        // Text round-trips lose the last bits; renormalise before validation.
        if (std::abs(w.norm() - 1.0) > 1e-9)
            throw SchemaError("codebook", lineno, "codeword is not unit-norm");
        w.normalize();
        const bool cm = is_constant_modulus(w);
        cws.emplace_back(std::move(w), cm);
    }
    if (cws.empty())
        throw SchemaError("codebook", lineno, "no codewords");
    return Codebook(std::move(cws));
}

void write_tree_codebook(std::ostream& out, const HierarchicalCodebook& tree)
{
    for (int s = 1; s <= tree.depth(); ++s)
        for (int i = 0; i < tree.stage(s).size(); ++i) {
            out << s << ',' << i << ',';
            write_weights(out, tree.node(s, i).weights());
            out << '\n';
        }
}

std::string describe_geometry(const ArrayGeometry& g)
{
    std::ostringstream ss;
    switch (g.kind()) {
    case ArrayKind::ULA:
        ss << "ula " << g.primary_count() << ' ' << format_double(g.spacing());
        break;
    case ArrayKind::URPA:
        ss << "urpa " << g.primary_count() << ' ' << g.secondary_count() << ' ' << format_double(g.spacing()) << ' '
           << format_double(g.secondary_spacing());
        break;
    case ArrayKind::UHPA:
        ss << "uhpa " << g.primary_count() << ' ' << format_double(g.spacing());
        break;
    case ArrayKind::UCPA:
        ss << "ucpa " << g.primary_count();
        for (double r : g.radii())
            ss << ' ' << format_double(r);
        break;
    }
    return ss.str();
}

ArrayGeometry parse_geometry(const std::vector<std::string>& t, double wavelength_m)
{
    const std::string src = "geometry";
    if (t.empty())
        throw SchemaError(src, 0, "empty geometry");
    const std::string& kind = t[0];
    auto need = [&](std::size_t n) {
        if (t.size() != n)
            throw SchemaError(src, 0, kind + " takes " + std::to_string(n - 1) + " values");
    };
    if (kind == "ula") {
        need(3);
        return ArrayGeometry::ula(to_int(t[1], src, 0), wavelength_m, to_double(t[2], src, 0));
    }
    if (kind == "urpa") {
        need(5);
        return ArrayGeometry::urpa(to_int(t[1], src, 0), to_int(t[2], src, 0), wavelength_m, to_double(t[3], src, 0),
                                   to_double(t[4], src, 0));
    }
    if (kind == "uhpa") {
        need(3);
        return ArrayGeometry::uhpa(to_int(t[1], src, 0), wavelength_m, to_double(t[2], src, 0));
    }
    if (kind == "ucpa") {
        if (t.size() < 2)
            throw SchemaError(src, 0, "ucpa needs a circle count");
        const int c = to_int(t[1], src, 0);
        std::vector<double> radii;
        for (std::size_t i = 2; i < t.size(); ++i)
            radii.push_back(to_double(t[i], src, 0));
        return ArrayGeometry::ucpa(c, wavelength_m, std::move(radii));
    }
    throw SchemaError(src, 0, "unknown array kind '" + kind + "'");
}

void write_channel(std::ostream& out, const ChannelDescription& d)
{
    if (!d.tx || !d.rx)
        throw DomainError("write_channel", "both array geometries are required");
    if (d.medium == "standard")
        out << "medium standard\n";
    else
        out << "medium file " << d.medium << ' ' << format_double(d.temperature_k) << ' '
            << format_double(d.pressure_atm) << '\n';
    out << "frequency " << format_double(d.frequency_hz) << '\n';
    out << "tx " << describe_geometry(*d.tx) << '\n';
    out << "rx " << describe_geometry(*d.rx) << '\n';
    out << "decay " << format_double(d.gamma_cluster_s) << ' ' << format_double(d.gamma_ray_s) << '\n';
    for (const auto& r : d.rays) {
        out << "ray " << r.cluster_index << ' ' << r.ray_index << ' ' << format_double(r.aod.azimuth()) << ' '
            << format_double(r.aod.elevation()) << ' ' << format_double(r.aoa.azimuth()) << ' '
            << format_double(r.aoa.elevation()) << ' ' << format_double(r.distance_m) << ' '
            << format_double(r.cluster_arrival_s) << ' ' << format_double(r.ray_arrival_s) << '\n';
    }
}

ChannelDescription read_channel(std::istream& in, const std::string& source)
{
    ChannelDescription d;
    bool have_frequency = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = tokens_of(line);
        if (t.empty() || t[0][0] == '#')
            continue;
        const std::string& key = t[0];
        try {
            if (key == "medium") {
                if (t.size() == 2 && t[1] == "standard") {
                    d.medium = "standard";
                } else if (t.size() == 5 && t[1] == "file") {
                    d.medium = t[2];
                    d.temperature_k = to_double(t[3], source, lineno);
                    d.pressure_atm = to_double(t[4], source, lineno);
                } else {
                    throw SchemaError(source, lineno, "medium must be 'standard' or 'file <path> <T> <P>'");
                }
            } else if (key == "frequency") {
                if (t.size() != 2)
                    throw SchemaError(source, lineno, "frequency takes one value");
                d.frequency_hz = to_double(t[1], source, lineno);
                have_frequency = true;
            } else if (key == "tx" || key == "rx") {
                if (!have_frequency)
                    throw SchemaError(source, lineno, "frequency must precede array geometries");
                auto g = parse_geometry({t.begin() + 1, t.end()}, wavelength(d.frequency_hz));
                (key == "tx" ? d.tx : d.rx) = std::move(g);
            } else if (key == "decay") {
                if (t.size() != 3)
                    throw SchemaError(source, lineno, "decay takes two values");
                d.gamma_cluster_s = to_double(t[1], source, lineno);
                d.gamma_ray_s = to_double(t[2], source, lineno);
            } else if (key == "ray") {
                if (t.size() != 10)
                    throw SchemaError(source, lineno, "ray takes nine values");
                RaySpec r;
                r.cluster_index = to_int(t[1], source, lineno);
                r.ray_index = to_int(t[2], source, lineno);
                r.aod = Direction(to_double(t[3], source, lineno), to_double(t[4], source, lineno));
                r.aoa = Direction(to_double(t[5], source, lineno), to_double(t[6], source, lineno));
                r.distance_m = to_double(t[7], source, lineno);
                r.cluster_arrival_s = to_double(t[8], source, lineno);
                r.ray_arrival_s = to_double(t[9], source, lineno);
                d.rays.push_back(r);
            } else {
                throw SchemaError(source, lineno, "unknown record '" + key + "'");
            }
        } catch (const SchemaError& e) {
            if (e.line() > 0)
                throw;
            throw SchemaError(source, lineno, e.what());
        }
    }
    if (!d.tx || !d.rx)
        throw SchemaError(source, lineno, "tx and rx geometries are required");
    return d;
}

ChannelMatrix build_channel(const ChannelDescription& d)
{
    if (!d.tx || !d.rx)
        throw DomainError("build_channel", "both array geometries are required");
    const Medium medium = d.medium == "standard" ? Medium::standard()
                                                 : Medium::from_file(d.medium, d.temperature_k, d.pressure_atm);
    SynthesisParams p;
    p.frequency_hz = d.frequency_hz;
    p.gamma_cluster_s = d.gamma_cluster_s;
    p.gamma_ray_s = d.gamma_ray_s;
    return synthesize_channel(medium, *d.tx, *d.rx, d.rays, p);
}

} // namespace thzbf
