#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace catq {

// Interned object name. Ids are process-wide and assigned in first-use order,
// so they are only used for identity; ordering always goes through the text.
using Symbol = std::uint32_t;

Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol symbol);

}  // namespace catq
