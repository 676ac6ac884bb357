#include "spde/errors.hpp"

namespace spde {

void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace spde
