#ifndef VIDMESH_ERROR_H_
#define VIDMESH_ERROR_H_

#include <stdexcept>
#include <string>

namespace vidmesh {

// Raised for malformed input: bad scenario files, invalid configuration,
// coincident nodes and the like.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an internal consistency check fails (e.g. positive flow with
// no source-to-sink path left after cycle removal).
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace vidmesh

#endif  // VIDMESH_ERROR_H_
