#include <atomic>
#include <cstdlib>
#include <string_view>

#include "whitneydim/kernels/kernels.hpp"

namespace whitneydim::kernels {

namespace {

const KernelTable* by_name(std::string_view name) noexcept {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") return avx2_table();
    if (name == "neon") return neon_table();
    return nullptr;
}

const KernelTable* widest() noexcept {
    if (const auto* t = avx2_table()) return t;
    if (const auto* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
    static std::atomic<const KernelTable*> current{[] {
        const char* env = std::getenv("WHITNEYDIM_KERNELS");
        if (env != nullptr) {
            if (const auto* t = by_name(env)) return t;
        }
        return widest();
    }()};
    return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool select(std::string_view name) noexcept {
    const KernelTable* t = name == "auto" ? widest() : by_name(name);
    if (t == nullptr) return false;
    slot().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace whitneydim::kernels
