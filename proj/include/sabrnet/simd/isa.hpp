#pragma once

#include <string_view>

namespace sabrnet::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best instruction set the running CPU supports among the compiled variants.
Isa detect_isa();

/// Instruction set used by the dispatching entry points. Chosen once per
/// process: detect_isa(), unless SABRNET_ISA=scalar|avx2 overrides it.
Isa active_isa();

/// True when `isa` was compiled in and the CPU supports it.
bool isa_available(Isa isa);

}  // namespace sabrnet::simd
