#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/types.hpp"

namespace isac::io {

/// Shortest text form that parses back to the identical double.
std::string format_double(double v);

/// One slot of the beam-exchange format:
///   header line  "n_t K slot"
///   K data lines "i k re0 im0 re1 im1 ..."   (i is the 1-based RSU,
///                                             k the vehicle id)
/// A file may concatenate sections for consecutive slots.
struct BeamSection {
    int n_t = 0;
    int declared_K = 0;
    int slot = 0;
    struct Row {
        int rsu = 0;  // 0-based in memory
        int vehicle = 0;
        CVec f;
    };
    std::vector<Row> rows;
};

std::vector<BeamSection> parse_beam_exchange(std::istream& in, const std::string& name);
std::vector<BeamSection> read_beam_exchange(const std::string& path);
void write_beam_section(std::ostream& out, const BeamSection& sec);

}  // namespace isac::io
