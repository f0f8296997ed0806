// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Problem definition: frequency, per-subdomain permittivities, geometry
// preset, and the numerical parameters every solver shares. Immutable after
// load and freely shareable across threads.

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmtrace/types.hpp"

namespace helmtrace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Homogeneous medium: positive real permittivity and derived wavenumber.
struct Medium {
    Real epsilon = 1.0;
    Real wavenumber = 1.0; // omega * sqrt(epsilon)
};

enum class GeometryKind { single_disk, three_subdomain_halfdisks, five_subdomain_quadrants, custom };

inline std::string to_string(GeometryKind g) {
    switch (g) {
        case GeometryKind::single_disk: return "single_disk";
        case GeometryKind::three_subdomain_halfdisks: return "three_subdomain";
        case GeometryKind::five_subdomain_quadrants: return "five_subdomain";
        case GeometryKind::custom: return "custom";
    }
    return "?";
}

struct Scenario {
    Real omega = 1.0;
    std::vector<Medium> media;     // index 0 = unbounded exterior
    GeometryKind geometry_kind = GeometryKind::three_subdomain_halfdisks;
    Vec2 incident_direction{1.0, 0.0};
    Real eta = 1.0;                // coupling constant, defaults to k0
    Real sigma_dtnr = 0.1;         // complexification shift for DtN-Robin maps
    Real sigma_gsqr_exponent = 1.0 / 3.0; // sigma_j = k_j^exponent for GSqR
    int points_per_interface = 64; // n, even
    int sigmoid_degree = 3;        // p >= 2 (4 is the usual choice for g-MTF)
    Real gmres_tol = 1e-4;
    int gmres_maxit = 4000;
    int n_trunc = 40;
    int farfield_directions = 1024;

    Real k(int j) const { return media.at(std::size_t(j)).wavenumber; }
    Real eps(int j) const { return media.at(std::size_t(j)).epsilon; }
    int subdomain_count() const { return int(media.size()); } // including exterior
    Real sigma_gsqr(int j) const { return std::pow(k(j), sigma_gsqr_exponent); }
};

namespace detail {

inline std::vector<Real> parse_real_list(const std::string& s, const std::string& key) {
    std::string t;
    for (char c : s)
        if (c != '[' && c != ']') t += c;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream in(t);
    std::vector<Real> out;
    Real v;
    while (in >> v) out.push_back(v);
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

} // namespace detail

/// Parse the flat key/value config format. Unknown keys are rejected so that
/// typos surface immediately. Derived quantities (wavenumbers, eta default)
/// are filled in here.
inline Scenario load_scenario_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }

    Scenario s;
    bool have_eta = false, have_maxit = false;
    std::vector<Real> epsilons = {1.0, 4.0, 16.0};
    for (const auto& [key, val] : kv) {
        try {
            if (key == "omega")
                s.omega = std::stod(val);
            else if (key == "epsilons")
                epsilons = detail::parse_real_list(val, key);
            else if (key == "geometry") {
                if (val == "single_disk")
                    s.geometry_kind = GeometryKind::single_disk;
                else if (val == "three_subdomain" || val == "three_subdomain_halfdisks")
                    s.geometry_kind = GeometryKind::three_subdomain_halfdisks;
                else if (val == "five_subdomain" || val == "five_subdomain_quadrants")
                    s.geometry_kind = GeometryKind::five_subdomain_quadrants;
                else if (val == "custom")
                    throw ConfigError("geometry 'custom' requires programmatic arc input");
                else
                    throw ConfigError("unknown geometry kind '" + val + "'");
            } else if (key == "incident") {
                const auto d = detail::parse_real_list(val, key);
                if (d.size() != 2) throw ConfigError("incident must have two components");
                s.incident_direction = {d[0], d[1]};
            } else if (key == "eta") {
                s.eta = std::stod(val);
                have_eta = true;
            } else if (key == "sigma_dtnr")
                s.sigma_dtnr = std::stod(val);
            else if (key == "sigma_gsqr_exponent")
                s.sigma_gsqr_exponent = std::stod(val);
            else if (key == "n")
                s.points_per_interface = std::stoi(val);
            else if (key == "sigmoid_degree")
                s.sigmoid_degree = std::stoi(val);
            else if (key == "gmres_tol")
                s.gmres_tol = std::stod(val);
            else if (key == "gmres_maxit") {
                s.gmres_maxit = std::stoi(val);
                have_maxit = true;
            } else if (key == "n_trunc")
                s.n_trunc = std::stoi(val);
            else if (key == "farfield_n")
                s.farfield_directions = std::stoi(val);
            else
                throw ConfigError("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse value for key '" + key + "'");
        }
    }

    if (s.omega <= 0.0) throw ConfigError("omega must be positive");
    s.media.clear();
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
        if (!(epsilons[j] > 0.0))
            throw ConfigError("epsilons[" + std::to_string(j) + "] must be a positive real");
        s.media.push_back({epsilons[j], s.omega * std::sqrt(epsilons[j])});
    }
    if (!have_eta) s.eta = s.media[0].wavenumber; // eta = k0 default
    if (!(s.eta > 0.0)) throw ConfigError("eta must be positive");
    if (s.points_per_interface <= 0 || s.points_per_interface % 2 != 0)
        throw ConfigError("n must be a positive even integer");
    if (s.sigmoid_degree < 2) throw ConfigError("sigmoid_degree must be >= 2");
    if (s.farfield_directions < 1) throw ConfigError("farfield_n must be >= 1");
    if (!have_maxit) s.gmres_maxit = 4000;

    const int expected = [&] {
        switch (s.geometry_kind) {
            case GeometryKind::single_disk: return 2;
            case GeometryKind::three_subdomain_halfdisks: return 3;
            case GeometryKind::five_subdomain_quadrants: return 5;
            default: return -1;
        }
    }();
    if (expected > 0 && int(s.media.size()) != expected)
        throw ConfigError("geometry '" + to_string(s.geometry_kind) + "' needs " +
                          std::to_string(expected) + " epsilons, got " +
                          std::to_string(s.media.size()));
    return s;
}

/// Serialize with full precision so that a reload round-trips bit-identically.
inline std::string save_scenario_text(const Scenario& s) {
    std::ostringstream out;
    out.precision(17);
    out << "omega = " << s.omega << "\n";
    out << "epsilons = ";
    for (std::size_t j = 0; j < s.media.size(); ++j)
        out << (j ? "," : "") << s.media[j].epsilon;
    out << "\n";
    out << "geometry = " << to_string(s.geometry_kind) << "\n";
    out << "incident = " << s.incident_direction.x << "," << s.incident_direction.y << "\n";
    out << "eta = " << s.eta << "\n";
    out << "sigma_dtnr = " << s.sigma_dtnr << "\n";
    out << "sigma_gsqr_exponent = " << s.sigma_gsqr_exponent << "\n";
    out << "n = " << s.points_per_interface << "\n";
    out << "sigmoid_degree = " << s.sigmoid_degree << "\n";
    out << "gmres_tol = " << s.gmres_tol << "\n";
    out << "gmres_maxit = " << s.gmres_maxit << "\n";
    out << "n_trunc = " << s.n_trunc << "\n";
    out << "farfield_n = " << s.farfield_directions << "\n";
    return out.str();
}

/// Incident plane wave value exp(i k0 d.x) at a point.
inline Cplx plane_wave_value(const Scenario& s, const Vec2& x) {
    return std::exp(iu * s.k(0) * s.incident_direction.dot(x));
}

/// Gradient of the incident plane wave at a point.
inline std::pair<Cplx, Cplx> plane_wave_gradient(const Scenario& s, const Vec2& x) {
    const Cplx v = plane_wave_value(s, x);
    return {iu * s.k(0) * s.incident_direction.x * v, iu * s.k(0) * s.incident_direction.y * v};
}

} // namespace helmtrace
