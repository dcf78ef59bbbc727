// Reduced Planck constant used by every formula in the library.
#pragma once

#include <atomic>
#include <cmath>

#include "qsl/errors.hpp"

namespace qsl {

namespace detail {
inline std::atomic<double>& hbar_storage() {
    static std::atomic<double> value{1.0};
    return value;
}
}  // namespace detail

/// Current value of hbar (default 1.0). Set it once before launching work.
inline double hbar() { return detail::hbar_storage().load(std::memory_order_relaxed); }

inline void set_hbar(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        fail(ErrorKind::InvalidArgument, "hbar must be positive and finite");
    }
    detail::hbar_storage().store(value, std::memory_order_relaxed);
}

/// Restores the previous hbar on scope exit.
class ScopedHbar {
public:
    explicit ScopedHbar(double value) : previous_(hbar()) { set_hbar(value); }
    ~ScopedHbar() { detail::hbar_storage().store(previous_, std::memory_order_relaxed); }
    ScopedHbar(const ScopedHbar&) = delete;
    ScopedHbar& operator=(const ScopedHbar&) = delete;

private:
    double previous_;
};

}  // namespace qsl
