#pragma once

// Per-level coefficient table: g-factors, polarizabilities, magnetic
// susceptibilities, quadrupole coefficients and ortho hyperfine constants,
// loaded from a versioned whitespace-separated text file.
//
// File format: '#' comment lines (a "# provenance:" comment is captured,
// and "# g_e_convention: direct|deviation" selects whether the g_e column
// holds g_e itself or the tabulated deviation 1 - g_e/g_e,free), then a
// header row naming the columns, then one record per (v,N).

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "h2pt/constants.hpp"
#include "h2pt/errors.hpp"
#include "h2pt/format.hpp"

namespace h2pt {

struct LevelCoefficients {
    int v = 0;
    int N = 0;
    double c_e = 0;        // Hz, electron spin-rotation coefficient
    double g_e = 0;        // scalar bound-electron g-factor (negative)
    double g_t = 0;        // tensor bound-electron g-factor
    double g_r = 0;        // rotational g-factor
    double alpha_s_dc = 0; // scalar d.c. polarizability, atomic units
    double alpha_t_dc = 0; // tensor d.c. polarizability, atomic units
    double alpha_s_ac = 0; // scalar a.c. polarizability at the laser frequency
    double alpha_t_ac = 0;
    double chi_s = 0;      // scalar magnetic susceptibility (dia+para), a.u.
    double chi_t = 0;      // tensor magnetic susceptibility, a.u.
    double e14 = 0;        // electric-quadrupole coefficient, MHz m^2/GV
    double b_F = 0;        // Hz, ortho Fermi-contact constant (0 for para)
    double d_1 = 0;        // Hz, ortho tensor hyperfine constant (0 for para)

    void validate() const {
        auto fail = [&](const std::string& what) {
            throw Error(ErrorKind::invariant,
                        "level (" + std::to_string(v) + "," +
                            std::to_string(N) + "): " + what);
        };
        if (v < 0 || N < 0) fail("v and N must be non-negative");
        if (N == 0) {
            // No rotation: no spin-rotation coupling, no rotational moment,
            // and all tensor (rank-2) coefficients vanish.
            if (c_e != 0) fail("c_e must be 0 at N=0");
            if (g_r != 0) fail("g_r must be 0 at N=0");
            if (g_t != 0) fail("g_t must be 0 at N=0");
            if (alpha_t_dc != 0 || alpha_t_ac != 0)
                fail("alpha_t must be 0 at N=0");
            if (chi_t != 0) fail("chi_t must be 0 at N=0");
            if (e14 != 0) fail("e14 must be 0 at N=0");
        }
        if (N % 2 == 0 && (b_F != 0 || d_1 != 0))
            fail("para levels (even N) have no nuclear spin: b_F = d_1 = 0");
    }
};

class CoefficientTable {
public:
    const LevelCoefficients& at(int v, int N) const {
        auto it = levels_.find({v, N});
        if (it == levels_.end())
            throw Error(ErrorKind::unsupported_level,
                        "level (" + std::to_string(v) + "," +
                            std::to_string(N) + ") not in table");
        return it->second;
    }
    bool contains(int v, int N) const { return levels_.count({v, N}) > 0; }
    void insert(const LevelCoefficients& lc) {
        lc.validate();
        levels_[{lc.v, lc.N}] = lc;
    }
    const std::map<std::pair<int, int>, LevelCoefficients>& levels() const {
        return levels_;
    }
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string p) { provenance_ = std::move(p); }

private:
    std::map<std::pair<int, int>, LevelCoefficients> levels_;
    std::string provenance_;
};

namespace detail {

inline double parse_number(const std::string& tok, int line_no,
                           const std::string& field) {
    try {
        std::size_t pos = 0;
        double val = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return val;
    } catch (const std::exception&) {
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                          ", field '" + field +
                                          "': cannot parse '" + tok + "'");
    }
}

} // namespace detail

inline CoefficientTable load_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::parse, "cannot open coefficient file " + path);

    CoefficientTable table;
    bool deviation_convention = false; // g_e column holds 1 - g_e/g_e,free
    std::vector<std::string> header;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("# provenance:", 0) == 0)
            table.set_provenance(line.substr(13));
        if (line.rfind("# g_e_convention:", 0) == 0) {
            std::string conv = line.substr(17);
            conv.erase(0, conv.find_first_not_of(" \t"));
            if (conv == "deviation")
                deviation_convention = true;
            else if (conv != "direct")
                throw Error(ErrorKind::parse,
                            "line " + std::to_string(line_no) +
                                ": unknown g_e_convention '" + conv + "'");
        }
        if (line.empty() || line[0] == '#') continue;

        std::istringstream ss(line);
        std::vector<std::string> toks;
        for (std::string t; ss >> t;) toks.push_back(t);
        if (header.empty()) {
            header = toks;
            continue;
        }
        if (toks.size() != header.size())
            throw Error(ErrorKind::parse,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(toks.size()));
        LevelCoefficients lc;
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string& f = header[i];
            double x = detail::parse_number(toks[i], line_no, f);
            if (f == "v") lc.v = static_cast<int>(x);
            else if (f == "N") lc.N = static_cast<int>(x);
            else if (f == "c_e") lc.c_e = x;
            else if (f == "g_e")
                lc.g_e = deviation_convention
                             ? constants().g_e_free * (1.0 - x)
                             : x;
            else if (f == "g_t") lc.g_t = x;
            else if (f == "g_r") lc.g_r = x;
            else if (f == "alpha_s_dc") lc.alpha_s_dc = x;
            else if (f == "alpha_t_dc") lc.alpha_t_dc = x;
            else if (f == "alpha_s_ac") lc.alpha_s_ac = x;
            else if (f == "alpha_t_ac") lc.alpha_t_ac = x;
            else if (f == "chi_s") lc.chi_s = x;
            else if (f == "chi_t") lc.chi_t = x;
            else if (f == "e14") lc.e14 = x;
            else if (f == "b_F") lc.b_F = x;
            else if (f == "d_1") lc.d_1 = x;
            else
                throw Error(ErrorKind::parse, "line " +
                                                  std::to_string(line_no) +
                                                  ": unknown column '" + f +
                                                  "'");
        }
        table.insert(lc);
    }
    if (table.levels().empty())
        throw Error(ErrorKind::parse, "no records in " + path);
    return table;
}

// Writes the table back in the same format. Values are printed with enough
// digits (shortest round-trip) that load(serialize(t)) is bit-exact.
inline void serialize_coefficients(const CoefficientTable& table,
                                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path);
    if (!table.provenance().empty())
        out << "# provenance:" << table.provenance() << "\n";
    out << "# g_e_convention: direct\n";
    out << "v N c_e g_e g_t g_r alpha_s_dc alpha_t_dc alpha_s_ac alpha_t_ac "
           "chi_s chi_t e14 b_F d_1\n";
    for (const auto& [key, lc] : table.levels()) {
        out << lc.v << ' ' << lc.N;
        for (double x : {lc.c_e, lc.g_e, lc.g_t, lc.g_r, lc.alpha_s_dc,
                         lc.alpha_t_dc, lc.alpha_s_ac, lc.alpha_t_ac, lc.chi_s,
                         lc.chi_t, lc.e14, lc.b_F, lc.d_1})
            out << ' ' << format_double(x);
        out << '\n';
    }
}

} // namespace h2pt
