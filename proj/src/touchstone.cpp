#include "sdlnet/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>
#include <vector>

namespace sdlnet {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string pair(std::complex<double> c) { return " " + num(c.real()) + " " + num(c.imag()); }

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string touchstone_extension(std::size_t ports) { return ".s" + std::to_string(ports) + "p"; }

void write_touchstone(const SParamGrid& grid, std::ostream& os) {
    if (grid.frequencies.empty()) throw ConfigError("grid", "refusing to write an empty grid");
    const auto n = static_cast<Eigen::Index>(grid.ports.size());

    os << "! sdlnet S-parameters\n";
    os << "! ports:";
    for (Port p : grid.ports) os << " " << p;
    os << "\n";
    if (!grid.schedule_id.empty()) os << "! schedule: " << grid.schedule_id << "\n";
    char z0[32];
    std::snprintf(z0, sizeof z0, "%.12g", grid.z0);
    os << "# Hz S RI R " << z0 << "\n";

    for (std::size_t f = 0; f < grid.frequencies.size(); ++f) {
        const auto& s = grid.s[f];
        os << num(grid.frequencies[f]);
        if (n <= 2) {
            // Two-port records use column order S11 S21 S12 S22.
            for (Eigen::Index c = 0; c < n; ++c) {
                for (Eigen::Index r = 0; r < n; ++r) os << pair(s(r, c));
            }
            os << "\n";
            continue;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                if (c > 0 && c % 4 == 0) os << "\n";
                if ((r > 0 || c > 0) && c % 4 == 0) os << " ";
                os << pair(s(r, c));
            }
            os << "\n";
        }
    }
}

void write_touchstone(const SParamGrid& grid, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_touchstone(grid, os);
    finish(os, path);
}

SParamGrid read_touchstone(std::istream& is, std::size_t ports) {
    if (ports == 0) throw ConfigError("touchstone", "port count must be >= 1");
    SParamGrid grid;
    grid.z0 = 50.0;
    double freq_scale = 1.0;
    std::string format = "RI";
    bool have_options = false;
    std::vector<double> values;

    std::string line;
    while (std::getline(is, line)) {
        if (line.starts_with("! ports:")) {
            std::istringstream ps(line.substr(8));
            for (Port p; ps >> p;) grid.ports.push_back(p);
            continue;
        }
        if (line.starts_with("! schedule: ")) {
            grid.schedule_id = line.substr(12);
            continue;
        }
        if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "#") {
            if (have_options) throw ConfigError("touchstone", "duplicate option line");
            have_options = true;
            for (std::string tok; ls >> tok;) {
                tok = upper(tok);
                if (tok == "HZ") freq_scale = 1.0;
                else if (tok == "KHZ") freq_scale = 1e3;
                else if (tok == "MHZ") freq_scale = 1e6;
                else if (tok == "GHZ") freq_scale = 1e9;
                else if (tok == "RI" || tok == "MA" || tok == "DB") format = tok;
                else if (tok == "S") continue;
                else if (tok == "R") {
                    if (!(ls >> grid.z0)) throw ConfigError("touchstone", "missing reference impedance");
                } else {
                    throw ConfigError("touchstone", "unsupported option '" + tok + "'");
                }
            }
            continue;
        }
        ls.clear();
        ls.str(line);
        for (std::string tok; ls >> tok;) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("touchstone", "bad number '" + tok + "'");
            }
        }
    }

    const std::size_t record = 1 + 2 * ports * ports;
    if (values.empty() || values.size() % record != 0) {
        throw ConfigError("touchstone", "data does not form whole " + std::to_string(ports) + "-port records");
    }
    if (grid.ports.empty()) {
        for (std::size_t p = 1; p <= ports; ++p) grid.ports.push_back(static_cast<Port>(p));
    } else if (grid.ports.size() != ports) {
        throw ConfigError("touchstone", "port list does not match the port count");
    }

    const auto n = static_cast<Eigen::Index>(ports);
    for (std::size_t at = 0; at < values.size(); at += record) {
        grid.frequencies.push_back(values[at] * freq_scale);
        Eigen::MatrixXcd s(n, n);
        for (Eigen::Index i = 0; i < n * n; ++i) {
            const double x = values[at + 1 + 2 * static_cast<std::size_t>(i)];
            const double y = values[at + 2 + 2 * static_cast<std::size_t>(i)];
            std::complex<double> v;
            if (format == "RI") v = {x, y};
            else if (format == "MA") v = std::polar(x, y * std::numbers::pi / 180.0);
            else v = std::polar(std::pow(10.0, x / 20.0), y * std::numbers::pi / 180.0);
            const Eigen::Index r = n <= 2 ? i % n : i / n;
            const Eigen::Index c = n <= 2 ? i / n : i % n;
            s(r, c) = v;
        }
        grid.s.push_back(std::move(s));
    }
    return grid;
}

SParamGrid read_touchstone(const std::filesystem::path& path) {
    static const std::regex ext(R"(\.[sS](\d+)[pP])");
    std::smatch m;
    const auto e = path.extension().string();
    if (!std::regex_match(e, m, ext)) throw ConfigError("touchstone", path.string() + " has no .sNp extension");
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_touchstone(is, std::stoul(m[1].str()));
}

void write_csv(const SParamGrid& grid, std::ostream& os) {
    if (grid.frequencies.empty()) throw ConfigError("grid", "refusing to write an empty grid");
    const std::string sep = !grid.ports.empty() && grid.ports.back() >= 10 ? "_" : "";
    os << "freq_hz";
    for (Port to : grid.ports) {
        for (Port from : grid.ports) {
            os << ",S" << to << sep << from << "_re,S" << to << sep << from << "_im";
        }
    }
    os << "\n";
    const auto n = static_cast<Eigen::Index>(grid.ports.size());
    for (std::size_t f = 0; f < grid.frequencies.size(); ++f) {
        os << num(grid.frequencies[f]);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) os << "," << num(grid.s[f](r, c).real()) << "," << num(grid.s[f](r, c).imag());
        }
        os << "\n";
    }
}

void write_csv(const SParamGrid& grid, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_csv(grid, os);
    finish(os, path);
}

}  // namespace sdlnet
