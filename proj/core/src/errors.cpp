#include "couette/errors.hpp"

namespace couette {

Error::Error(ErrorKind kind, const std::string& name, const std::string& what)
    : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}

}  // namespace couette
