#include "sabrnet/simd/isa.hpp"

#include <cstdlib>
#include <string>

namespace sabrnet::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(SABRNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("SABRNET_ISA")) {
      const std::string want(env);
      if (want == "scalar") return Isa::scalar;
      if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    }
    return detect_isa();
  }();
  return chosen;
}

}  // namespace sabrnet::simd
