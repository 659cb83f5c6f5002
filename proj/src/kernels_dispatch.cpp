#include "symnet/kernels.hpp"

#include <cstdio>
#include <cstdlib>

namespace symnet::kernels {

namespace detail {
// Defined in the backend translation units that actually get compiled.
const Ops& avx2_table();
const Ops& neon_table();
}  // namespace detail

const Ops* avx2() {
#if defined(SYMNET_HAVE_AVX2_BUILD)
    return __builtin_cpu_supports("avx2") ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const Ops* neon() {
#if defined(SYMNET_HAVE_NEON_BUILD)
    // NEON is mandatory on aarch64, no runtime probe needed.
    return &detail::neon_table();
#else
    return nullptr;
#endif
}

namespace {

const Ops* g_active = nullptr;

const Ops* resolve(std::string_view name) {
    if (name == "scalar") return &scalar();
    if (name == "avx2") return avx2();
    if (name == "neon") return neon();
    return nullptr;
}

const Ops* pick_default() {
    if (const char* env = std::getenv("SYMNET_KERNELS")) {
        if (const Ops* ops = resolve(env)) return ops;
        std::fprintf(stderr,
                     "symnet: SYMNET_KERNELS=%s not available, using default\n",
                     env);
    }
    if (const Ops* ops = avx2()) return ops;
    if (const Ops* ops = neon()) return ops;
    return &scalar();
}

}  // namespace

const Ops& active() {
    if (!g_active) g_active = pick_default();
    return *g_active;
}

bool select(std::string_view name) {
    if (name == "auto") {
        g_active = pick_default();
        return true;
    }
    if (const Ops* ops = resolve(name)) {
        g_active = ops;
        return true;
    }
    return false;
}

std::vector<std::string> available() {
    std::vector<std::string> names{"scalar"};
    if (avx2()) names.emplace_back("avx2");
    if (neon()) names.emplace_back("neon");
    return names;
}

}  // namespace symnet::kernels
