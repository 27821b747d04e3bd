#include "bqsos/errors.hpp"

namespace bqsos {

void throw_dimension(const std::string& what) { throw DimensionError(what); }

}  // namespace bqsos
