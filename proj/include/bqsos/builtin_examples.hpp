#pragma once

#include <string>
#include <vector>

#include "bqsos/problem_io.hpp"

namespace bqsos {

struct BuiltinExample {
  std::string name;
  std::string description;
  Problem problem;  ///< problem.provenance says where the instance comes from
};

const std::vector<BuiltinExample>& builtin_examples();

/// nullptr when there is no example with that name. "indefinite-flattening" aliases "qi-page-358".
const BuiltinExample* find_builtin(const std::string& name);

}  // namespace bqsos
