#include "avgdrem/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace avgdrem {

std::size_t StateLayout::add(const std::string& name, std::size_t size) {
    if (contains(name)) throw ParameterError("StateLayout: duplicate block '" + name + "'");
    blocks_.push_back(Block{name, size_, size});
    size_ += size;
    return blocks_.back().offset;
}

const StateLayout::Block& StateLayout::block(const std::string& name) const {
    const auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.name == name; });
    if (it == blocks_.end()) throw ParameterError("StateLayout: no block '" + name + "'");
    return *it;
}

bool StateLayout::contains(const std::string& name) const {
    return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.name == name; });
}

const std::string& StateLayout::owner(std::size_t i) const {
    for (const auto& b : blocks_) {
        if (i >= b.offset && i < b.offset + b.size) return b.name;
    }
    throw DimensionError("StateLayout: index " + std::to_string(i) + " out of range");
}

std::span<const double> StateLayout::view(std::span<const double> s, const std::string& name) const {
    const Block& b = block(name);
    return s.subspan(b.offset, b.size);
}

std::span<double> StateLayout::view(std::span<double> s, const std::string& name) const {
    const Block& b = block(name);
    return s.subspan(b.offset, b.size);
}

std::map<std::string, Vec> StateLayout::unpack(std::span<const double> s) const {
    if (s.size() != size_) throw DimensionError("StateLayout::unpack: state size mismatch");
    std::map<std::string, Vec> out;
    for (const auto& b : blocks_) {
        const auto v = s.subspan(b.offset, b.size);
        out.emplace(b.name, Vec(v.begin(), v.end()));
    }
    return out;
}

SystemState StateLayout::pack(const std::map<std::string, Vec>& blocks) const {
    SystemState s(size_, 0.0);
    for (const auto& b : blocks_) {
        const auto it = blocks.find(b.name);
        if (it == blocks.end()) throw ParameterError("StateLayout::pack: missing block '" + b.name + "'");
        if (it->second.size() != b.size) throw DimensionError("StateLayout::pack: block '" + b.name + "' size");
        std::copy(it->second.begin(), it->second.end(), s.begin() + static_cast<std::ptrdiff_t>(b.offset));
    }
    return s;
}

StepError::StepError(double t, std::string block)
    : std::runtime_error("non-finite state at t = " + std::to_string(t) + " in block '" + block + "'"),
      t_(t),
      block_(std::move(block)) {}

SystemState rk4_step(const Rhs& rhs, const SystemState& s, double t, double h, const StateLayout* layout) {
    if (!(h > 0.0)) throw ParameterError("rk4_step: step must be > 0");
    const std::size_t n = s.size();
    SystemState k1(n), k2(n), k3(n), k4(n), tmp(n);

    rhs(t, s, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
    rhs(t + h, tmp, k4);

    SystemState next(n);
    for (std::size_t i = 0; i < n; ++i) {
        next[i] = s[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(next[i])) {
            throw StepError(t, layout != nullptr ? layout->owner(i) : "index " + std::to_string(i));
        }
    }
    return next;
}

IntegrationOutcome integrate(const Rhs& rhs, SystemState& s, double t0, double horizon, double h,
                             double sample_every, const Sampler& on_sample, const StateLayout* layout) {
    if (!(h > 0.0)) throw ParameterError("integrate: step must be > 0");
    if (!(horizon >= 0.0)) throw ParameterError("integrate: horizon must be >= 0");
    if (!(sample_every > 0.0)) throw ParameterError("integrate: sample interval must be > 0");

    const double stride_real = sample_every / h;
    const auto stride = static_cast<std::size_t>(std::llround(stride_real));
    if (stride == 0 || std::abs(static_cast<double>(stride) * h - sample_every) > 1e-12 * std::max(1.0, sample_every)) {
        throw ParameterError("integrate: step must divide the sample interval");
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / h));
    if (std::abs(static_cast<double>(n_steps) * h - horizon) > 1e-9 * std::max(1.0, horizon)) {
        throw ParameterError("integrate: step must divide the horizon");
    }

    IntegrationOutcome outcome;
    if (on_sample) on_sample(t0, s);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        try {
            s = rk4_step(rhs, s, t, h, layout);
        } catch (const StepError& e) {
            outcome.failure = StepFailure{e.time(), e.block()};
            return outcome;
        }
        ++outcome.steps;
        if ((k + 1) % stride == 0 && on_sample) on_sample(t0 + static_cast<double>(k + 1) * h, s);
    }
    return outcome;
}

}  // namespace avgdrem
