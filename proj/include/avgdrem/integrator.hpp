#pragma once

// Fixed-step classical Runge-Kutta over a flat state vector whose named
// blocks are described by a StateLayout.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgdrem/smallmat.hpp"

namespace avgdrem {

using SystemState = std::vector<double>;

class StateLayout {
public:
    struct Block {
        std::string name;
        std::size_t offset = 0;
        std::size_t size = 0;
    };

    /// Appends a block and returns its offset. Names must be unique.
    std::size_t add(const std::string& name, std::size_t size);

    [[nodiscard]] const Block& block(const std::string& name) const;
    [[nodiscard]] bool contains(const std::string& name) const;
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
    /// Name of the block that owns flat index i.
    [[nodiscard]] const std::string& owner(std::size_t i) const;

    [[nodiscard]] std::span<const double> view(std::span<const double> s, const std::string& name) const;
    [[nodiscard]] std::span<double> view(std::span<double> s, const std::string& name) const;

    [[nodiscard]] std::map<std::string, Vec> unpack(std::span<const double> s) const;
    [[nodiscard]] SystemState pack(const std::map<std::string, Vec>& blocks) const;

private:
    std::vector<Block> blocks_;
    std::size_t size_ = 0;
};

/// ds = f(t, s). Must not retain the spans.
using Rhs = std::function<void(double t, std::span<const double> s, std::span<double> ds)>;

/// Raised when a step produces a non-finite entry.
class StepError : public std::runtime_error {
public:
    StepError(double t, std::string block);
    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const std::string& block() const noexcept { return block_; }

private:
    double t_;
    std::string block_;
};

/// One classical RK4 step from (t, s) with step h > 0. The layout, when
/// given, names the offending block in a StepError.
SystemState rk4_step(const Rhs& rhs, const SystemState& s, double t, double h,
                     const StateLayout* layout = nullptr);

struct StepFailure {
    double t = 0.0;
    std::string block;
};

struct IntegrationOutcome {
    std::size_t steps = 0;
    std::optional<StepFailure> failure;
};

using Sampler = std::function<void(double t, std::span<const double> s)>;

/// Advances s from t0 over [t0, t0 + horizon] with step h, calling
/// on_sample at t0 and every sample_every seconds. sample_every must be an
/// integer multiple of h (within 1e-12 relative) and so must horizon
/// (within 1e-9 relative). On a StepError the outcome carries the failure
/// and s holds the last finite state.
IntegrationOutcome integrate(const Rhs& rhs, SystemState& s, double t0, double horizon, double h,
                             double sample_every, const Sampler& on_sample, const StateLayout* layout = nullptr);

}  // namespace avgdrem
