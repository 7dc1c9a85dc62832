#include "isac/beam_exchange.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "isac/errors.hpp"

namespace isac::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

FormatError fail(const std::string& name, int line, const std::string& what) {
    return FormatError(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<BeamSection> parse_beam_exchange(std::istream& in, const std::string& name) {
    std::vector<BeamSection> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream hs(line);
        BeamSection sec;
        if (!(hs >> sec.n_t >> sec.declared_K >> sec.slot))
            throw fail(name, lineno, "expected header 'n_t K slot'");
        if (sec.n_t < 1 || sec.declared_K < 0)
            throw fail(name, lineno, "non-positive n_t or negative K in header");
        for (int r = 0; r < sec.declared_K; ++r) {
            if (!std::getline(in, line))
                throw fail(name, lineno, "section truncated: expected " +
                                             std::to_string(sec.declared_K) +
                                             " beam rows");
            ++lineno;
            std::istringstream rs(line);
            BeamSection::Row row;
            int rsu_1based = 0;
            if (!(rs >> rsu_1based >> row.vehicle))
                throw fail(name, lineno, "expected 'i k' row prefix");
            if (rsu_1based < 1 || rsu_1based > 2)
                throw fail(name, lineno, "RSU index must be 1 or 2");
            row.rsu = rsu_1based - 1;
            row.f.resize(sec.n_t);
            for (int p = 0; p < sec.n_t; ++p) {
                double re = 0.0, im = 0.0;
                if (!(rs >> re >> im))
                    throw fail(name, lineno,
                               "expected " + std::to_string(2 * sec.n_t) +
                                   " beam coefficients");
                row.f(p) = Cplx(re, im);
            }
            double extra;
            if (rs >> extra) throw fail(name, lineno, "trailing fields on beam row");
            sec.rows.push_back(std::move(row));
        }
        sections.push_back(std::move(sec));
    }
    return sections;
}

std::vector<BeamSection> read_beam_exchange(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open");
    return parse_beam_exchange(in, path);
}

void write_beam_section(std::ostream& out, const BeamSection& sec) {
    out << sec.n_t << ' ' << sec.rows.size() << ' ' << sec.slot << '\n';
    for (const auto& row : sec.rows) {
        out << (row.rsu + 1) << ' ' << row.vehicle;
        for (int p = 0; p < row.f.size(); ++p)
            out << ' ' << format_double(row.f(p).real()) << ' '
                << format_double(row.f(p).imag());
        out << '\n';
    }
}

}  // namespace isac::io
