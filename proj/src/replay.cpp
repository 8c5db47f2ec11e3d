#include "erb/replay.hpp"

#include <algorithm>
#include <cmath>

namespace erb {

ObsVec::ObsVec(const std::vector<double>& dense) : dim_(dense.size()) {
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double v = dense[i];
        if (v != 0.0 || std::signbit(v)) {
            nz_.emplace_back(static_cast<std::uint32_t>(i), v);
        }
    }
}

ObsVec::ObsVec(std::size_t dim, std::vector<Entry> entries) : dim_(dim), nz_(std::move(entries)) {
    for (std::size_t i = 0; i < nz_.size(); ++i) {
        if (nz_[i].first >= dim_ || (i > 0 && nz_[i].first <= nz_[i - 1].first)) {
            throw InvalidArgument("ObsVec: entries must be sorted, unique, and in range");
        }
        if (nz_[i].second == 0.0 && !std::signbit(nz_[i].second)) {
            throw InvalidArgument("ObsVec: explicit +0.0 entry");
        }
    }
}

ObsVec ObsVec::block(std::size_t dim, std::size_t offset, std::span<const double> values) {
    if (offset + values.size() > dim) {
        throw InvalidArgument("ObsVec::block: block out of range");
    }
    ObsVec v;
    v.dim_ = dim;
    v.nz_.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i];
        if (x != 0.0 || std::signbit(x)) {
            v.nz_.emplace_back(static_cast<std::uint32_t>(offset + i), x);
        }
    }
    return v;
}

std::vector<double> ObsVec::to_dense() const {
    std::vector<double> out(dim_, 0.0);
    for (const auto& [i, v] : nz_) out[i] = v;
    return out;
}

double ObsVec::dot(std::span<const double> dense) const {
    double acc = 0.0;
    for (const auto& [i, v] : nz_) acc += v * dense[i];
    return acc;
}

bool operator<(const ObsVec& a, const ObsVec& b) {
    if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
    return a.nz_ < b.nz_;
}

bool experience_less(const Experience& a, const Experience& b) {
    if (a.reward != b.reward) return a.reward < b.reward;
    if (a.action != b.action) return a.action < b.action;
    if (a.terminal != b.terminal) return a.terminal < b.terminal;
    if (a.obs != b.obs) return a.obs < b.obs;
    return a.next_obs < b.next_obs;
}

ReplayBuffer::ReplayBuffer(std::size_t obs_dim, int num_actions, std::string env_id,
                           std::optional<std::size_t> capacity)
    : obs_dim_(obs_dim), num_actions_(num_actions), env_id_(std::move(env_id)), capacity_(capacity) {
    if (obs_dim_ == 0) throw InvalidArgument("ReplayBuffer: obs_dim must be positive");
    if (num_actions_ <= 0) throw InvalidArgument("ReplayBuffer: num_actions must be positive");
    if (capacity_ && *capacity_ == 0) throw InvalidArgument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::validate_experience(const Experience& e) const {
    if (e.obs.dim() != obs_dim_ || e.next_obs.dim() != obs_dim_) {
        throw DimensionError("experience observation dimension does not match buffer obs_dim");
    }
    if (e.action < 0 || e.action >= num_actions_) {
        throw InvalidArgument("experience action id outside [0, num_actions)");
    }
    if (!std::isfinite(e.reward)) {
        throw InvalidArgument("experience reward must be finite");
    }
}

void ReplayBuffer::append(Experience e) {
    validate_experience(e);
    experiences_.push_back(std::move(e));
    if (capacity_ && experiences_.size() > *capacity_) {
        experiences_.pop_front();
    }
}

std::vector<double> ReplayBuffer::reward_vector() const {
    std::vector<double> out;
    out.reserve(experiences_.size());
    for (const auto& e : experiences_) out.push_back(e.reward);
    return out;
}

std::string to_string(Method m) {
    switch (m) {
        case Method::coreset: return "coreset";
        case Method::uniform: return "uniform";
        case Method::icdf: return "icdf";
        case Method::sensitivity: return "sensitivity";
        case Method::group: return "group";
    }
    throw InvalidArgument("unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "coreset") return Method::coreset;
    if (s == "uniform") return Method::uniform;
    if (s == "icdf") return Method::icdf;
    if (s == "sensitivity") return Method::sensitivity;
    if (s == "group") return Method::group;
    throw InvalidArgument("unknown compression method: " + s);
}

std::uint64_t CompressedERB::weight_sum() const {
    std::uint64_t sum = 0;
    for (const auto& e : entries) sum += e.weight;
    return sum;
}

std::vector<double> CompressedERB::reward_vector() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.exp.reward);
    return out;
}

std::uint64_t compressed_entry_target(std::uint64_t n, double ratio) {
    if (n == 0) return 0;
    const double k = std::floor(static_cast<double>(n) / ratio);
    if (k < 1.0) return 1;
    return static_cast<std::uint64_t>(k);
}

void CompressedERB::validate() const {
    if (!(ratio >= 1.0)) throw FormatError("compressed ERB: ratio must be >= 1");
    if (obs_dim == 0) throw FormatError("compressed ERB: obs_dim must be positive");
    if (num_actions <= 0) throw FormatError("compressed ERB: num_actions must be positive");
    if (original_size >= 1 && entries.empty()) {
        throw FormatError("compressed ERB: no entries for a nonempty original buffer");
    }
    // Group sampling keeps at least one representative per group, which may
    // exceed floor(N/R); weight positivity still bounds entries by N.
    if (method != Method::group && entries.size() > compressed_entry_target(original_size, ratio)) {
        throw FormatError("compressed ERB: more entries than max(1, floor(N/R))");
    }
    std::uint64_t sum = 0;
    for (const auto& we : entries) {
        if (we.weight < 1) throw FormatError("compressed ERB: weight must be a positive integer");
        if (we.exp.obs.dim() != obs_dim || we.exp.next_obs.dim() != obs_dim) {
            throw FormatError("compressed ERB: entry observation dimension mismatch");
        }
        if (we.exp.action < 0 || we.exp.action >= num_actions) {
            throw FormatError("compressed ERB: entry action id out of range");
        }
        if (!std::isfinite(we.exp.reward)) throw FormatError("compressed ERB: entry reward not finite");
        sum += we.weight;
    }
    if (sum != original_size) {
        throw FormatError("compressed ERB: weights sum to " + std::to_string(sum) +
                          ", expected original_size " + std::to_string(original_size));
    }
}

} // namespace erb
