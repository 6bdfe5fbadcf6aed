#ifndef PARTOPT_IO_HPP
#define PARTOPT_IO_HPP

#include <iosfwd>
#include <string>

#include "partopt/model.hpp"

namespace partopt {

// line-oriented instance format:
//   nodes <n>
//   labels <s> <K_s>          (one per node)
//   f0 <v>
//   unary <s> <i> <v>
//   edge <s> <t>
//   pair <s> <t> <i> <j> <v>
// unspecified entries default to 0. '#' starts a comment. the writer emits a
// canonical ordering with shortest round-trip number formatting, so
// parse(write(inst)) == inst and write(parse(text)) is deterministic.
EnergyInstance read_instance(std::istream& in);
EnergyInstance read_instance_file(const std::string& path);
void write_instance(std::ostream& out, const EnergyInstance& inst);
void write_instance_file(const std::string& path, const EnergyInstance& inst);

// shortest decimal representation that round-trips the exact double
std::string format_double(double v);

}  // namespace partopt

#endif
