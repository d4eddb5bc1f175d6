#pragma once

#include <span>
#include <string_view>

namespace hpmg {

// Ready-to-run configuration files embedded in the binary; `print-example`
// writes them out verbatim.
struct BuiltinExample {
  std::string_view name;
  std::string_view description;
  std::string_view text;
};

std::span<const BuiltinExample> builtin_examples();
const BuiltinExample* find_builtin_example(std::string_view name);

}  // namespace hpmg
