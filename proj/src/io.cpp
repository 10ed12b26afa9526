#include "cqed/io.hpp"

#include "cqed/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace cqed::io {

namespace {

constexpr std::string_view kSpectrumColumns = "energy_meV,intensity";
constexpr std::string_view kPeakColumns =
    "temperature_K,e_upper_meV,e_lower_meV,fwhm_upper_meV,fwhm_lower_meV,amp_upper,amp_lower";
constexpr std::string_view kPlusMinus = " \xC2\xB1 ";  // " ± "

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_at(std::string_view text, std::size_t line) {
    try {
        return parse_double(text);
    } catch (const InvalidInput& e) {
        throw ParseError(e.what(), line);
    }
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InvalidInput("not a number: '" + std::string(text) + "'");
    return v;
}

void write_spectra(std::ostream& os, std::span<const Spectrum> spectra) {
    for (std::size_t k = 0; k < spectra.size(); ++k) {
        const Spectrum& s = spectra[k];
        if (k > 0) os << '\n';
        os << "# temperature_K=" << format_double(s.temperature)
           << " resolution_meV=" << format_double(s.resolution_fwhm) << '\n';
        os << kSpectrumColumns << '\n';
        for (std::size_t i = 0; i < s.energies.size(); ++i)
            os << format_double(s.energies[i]) << ',' << format_double(s.intensities[i]) << '\n';
    }
}

std::vector<Spectrum> read_spectra(std::istream& is) {
    std::vector<Spectrum> out;
    std::optional<Spectrum> current;
    std::size_t header_line = 0;
    bool columns_seen = false;

    auto finish = [&]() {
        if (!current) return;
        if (current->energies.empty()) throw ParseError("spectrum block has no data rows", header_line);
        try {
            validate(*current);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), header_line);
        }
        out.push_back(std::move(*current));
        current.reset();
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) {
            finish();
            continue;
        }
        if (line.front() == '#') {
            finish();
            Spectrum s;
            bool have_t = false;
            bool have_r = false;
            std::istringstream fields{std::string(line.substr(1))};
            std::string tok;
            while (fields >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw ParseError("malformed header field '" + tok + "'", line_no);
                const std::string_view key(tok.data(), eq);
                const std::string_view val(tok.data() + eq + 1, tok.size() - eq - 1);
                if (key == "temperature_K") {
                    s.temperature = parse_at(val, line_no);
                    have_t = true;
                } else if (key == "resolution_meV") {
                    s.resolution_fwhm = parse_at(val, line_no);
                    have_r = true;
                } else {
                    throw ParseError("unknown header field '" + std::string(key) + "'", line_no);
                }
            }
            if (!have_t || !have_r) throw ParseError("header needs temperature_K and resolution_meV", line_no);
            current = std::move(s);
            header_line = line_no;
            columns_seen = false;
            continue;
        }
        if (!current) throw ParseError("data row before a '# temperature_K=...' header", line_no);
        if (line == kSpectrumColumns && !columns_seen && current->energies.empty()) {
            columns_seen = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 2) throw ParseError("expected 'energy_meV,intensity'", line_no);
        current->energies.push_back(parse_at(cols[0], line_no));
        current->intensities.push_back(parse_at(cols[1], line_no));
    }
    finish();
    if (out.empty()) throw ParseError("no spectrum found", line_no);
    return out;
}

void write_peak_table(std::ostream& os, const PeakTable& table) {
    os << kPeakColumns << '\n';
    for (const PeakRow& r : table.rows) {
        os << format_double(r.temperature) << ',' << format_double(r.e_upper) << ',' << format_double(r.e_lower)
           << ',' << format_double(r.gamma_upper) << ',' << format_double(r.gamma_lower) << ','
           << format_double(r.amp_upper) << ',' << format_double(r.amp_lower) << '\n';
    }
}

PeakTable read_peak_table(std::istream& is) {
    PeakTable table;
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (!header) {
            if (line.front() == '#') continue;
            if (line != kPeakColumns) throw ParseError("expected header '" + std::string(kPeakColumns) + "'", line_no);
            header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 7) throw ParseError("expected 7 columns", line_no);
        PeakRow r;
        double* fields[] = {&r.temperature, &r.e_upper,   &r.e_lower,  &r.gamma_upper,
                            &r.gamma_lower, &r.amp_upper, &r.amp_lower};
        for (std::size_t i = 0; i < 7; ++i) *fields[i] = parse_at(cols[i], line_no);
        table.rows.push_back(r);
        try {
            validate(table);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (!header) throw ParseError("missing peak table header", line_no);
    return table;
}

void write_fit_result(std::ostream& os, const FitResult& r) {
    for (std::size_t i = 0; i < r.params.size(); ++i) {
        os << r.names[i];
        if (i < r.units.size() && !r.units[i].empty()) os << '[' << r.units[i] << ']';
        os << '=' << format_double(r.params[i]) << kPlusMinus << format_double(r.sigmas[i]) << '\n';
    }
    os << "converged=" << (r.converged ? "true" : "false") << '\n';
    os << "residual_rms=" << format_double(r.residual_rms) << '\n';
    os << "iterations=" << r.n_iterations << '\n';
}

FitResult read_fit_result(std::istream& is) {
    FitResult r;
    std::string raw;
    std::size_t line_no = 0;
    bool have_converged = false, have_rms = false, have_iter = false;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0) throw ParseError("expected key=value", line_no);
        const std::string_view key = line.substr(0, eq);
        const std::string_view val = line.substr(eq + 1);
        if (key == "converged") {
            if (val == "true") r.converged = true;
            else if (val == "false") r.converged = false;
            else throw ParseError("converged must be true or false", line_no);
            have_converged = true;
        } else if (key == "residual_rms") {
            r.residual_rms = parse_at(val, line_no);
            have_rms = true;
        } else if (key == "iterations") {
            int n = 0;
            const auto res = std::from_chars(val.data(), val.data() + val.size(), n);
            if (res.ec != std::errc() || res.ptr != val.data() + val.size())
                throw ParseError("iterations must be an integer", line_no);
            r.n_iterations = n;
            have_iter = true;
        } else {
            const auto pm = val.find(kPlusMinus);
            if (pm == std::string_view::npos) throw ParseError("expected '<value> \xC2\xB1 <sigma>'", line_no);
            std::string name(key);
            std::string unit;
            if (const auto lb = key.find('['); lb != std::string_view::npos) {
                if (key.back() != ']') throw ParseError("malformed unit in '" + name + "'", line_no);
                name = std::string(key.substr(0, lb));
                unit = std::string(key.substr(lb + 1, key.size() - lb - 2));
            }
            r.names.push_back(name);
            r.units.push_back(unit);
            r.params.push_back(parse_at(val.substr(0, pm), line_no));
            r.sigmas.push_back(parse_at(val.substr(pm + kPlusMinus.size()), line_no));
        }
    }
    if (!have_converged || !have_rms || !have_iter)
        throw ParseError("fit result needs converged, residual_rms and iterations", line_no);
    return r;
}

void write_mode_table(std::ostream& os, std::span<const WgmMode> modes) {
    os << "m,p,pol,energy_meV,n_eff\n";
    for (const WgmMode& m : modes)
        os << m.azimuthal_m << ',' << m.radial_p << ',' << to_string(m.polarization) << ','
           << format_double(m.energy) << ',' << format_double(m.n_eff) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("error writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

} // namespace cqed::io
