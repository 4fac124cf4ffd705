#pragma once

#include <string>
#include <vector>

namespace rvpipe {

struct Example {
  std::string name;
  std::string description;
  std::string source;
};

/// Programs shipped with the simulator, sorted by name.
const std::vector<Example>& builtin_examples();

}  // namespace rvpipe
