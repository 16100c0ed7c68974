#ifndef VIDMESH_CSV_H_
#define VIDMESH_CSV_H_

#include <ostream>
#include <string>

namespace vidmesh {

// Shortest decimal text that reads back to the same double; locale-free so
// dumps are byte-stable.
std::string Num(double v);

// Writes fields separated by commas, then a newline.
template <typename... Fields>
void CsvRow(std::ostream& out, const Fields&... fields) {
  bool first = true;
  ((out << (first ? "" : ",") << fields, first = false), ...);
  out << '\n';
}

}  // namespace vidmesh

#endif  // VIDMESH_CSV_H_
