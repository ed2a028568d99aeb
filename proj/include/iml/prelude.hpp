/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <string_view>

#include "iml/ast.hpp"

namespace iml {

/// Source text of the built-in list type and List functions.
std::string_view prelude_source();

/// The parsed prelude, cached.
const SourceModule& prelude_module();

}  // namespace iml
