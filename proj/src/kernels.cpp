#include "polylab/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace polylab::kern {
namespace {

const Ops* g_active = nullptr;

const Ops* resolve_from_env() {
    const char* env = std::getenv("POLYLAB_SIMD");
    std::string want = env ? env : "auto";
    if (want == "scalar") return &scalar_ops();
    if (want == "avx2") {
        if (const Ops* a = avx2_ops()) return a;
        return &scalar_ops();
    }
    if (const Ops* a = avx2_ops()) return a;
    return &scalar_ops();
}

}  // namespace

const Ops& active() {
    if (!g_active) g_active = resolve_from_env();
    return *g_active;
}

bool select(const std::string& name) {
    if (name == "scalar") {
        g_active = &scalar_ops();
        return true;
    }
    if (name == "avx2") {
        if (const Ops* a = avx2_ops()) {
            g_active = a;
            return true;
        }
        return false;
    }
    if (name == "auto") {
        g_active = nullptr;
        (void)active();
        return true;
    }
    return false;
}

}  // namespace polylab::kern
