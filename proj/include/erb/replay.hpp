#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace erb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A precondition on input data does not hold (bad k, R < 1, missing scores, ...).
struct InvalidArgument : Error {
    using Error::Error;
};
// Dimension or action-id mismatch between an experience and its buffer.
struct DimensionError : Error {
    using Error::Error;
};
// Malformed ERB stream or invariant violation discovered while loading.
struct FormatError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// Observation feature vector, stored sparse. Gridworld observations have
// exactly context_dim nonzero entries out of G^d * context_dim, so dense
// storage would dominate memory during lifelong runs. Entries equal to +0.0
// are dropped; -0.0 is kept so serialization stays bit-exact.
class ObsVec {
public:
    using Entry = std::pair<std::uint32_t, double>;

    ObsVec() = default;
    explicit ObsVec(const std::vector<double>& dense);
    // entries must be sorted by index, unique, and inside [0, dim).
    ObsVec(std::size_t dim, std::vector<Entry> entries);
    // Vector of length dim that is zero outside [offset, offset + values.size()).
    static ObsVec block(std::size_t dim, std::size_t offset, std::span<const double> values);

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return nz_.size(); }
    const std::vector<Entry>& entries() const { return nz_; }
    std::vector<double> to_dense() const;
    double dot(std::span<const double> dense) const;

    friend bool operator==(const ObsVec&, const ObsVec&) = default;
    friend bool operator<(const ObsVec& a, const ObsVec& b);

private:
    std::size_t dim_ = 0;
    std::vector<Entry> nz_;
};

// One state-action-reward-next-state tuple with terminal flag.
struct Experience {
    ObsVec obs;
    std::int32_t action = 0;
    double reward = 0.0;
    ObsVec next_obs;
    bool terminal = false;

    friend bool operator==(const Experience&, const Experience&) = default;
};

// Total content order used to canonicalize experience sequences.
bool experience_less(const Experience& a, const Experience& b);

// Ordered experience store with optional FIFO capacity.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t obs_dim, int num_actions, std::string env_id,
                 std::optional<std::size_t> capacity = std::nullopt);

    // Appends e as the newest element, evicting the oldest when at capacity.
    void append(Experience e);

    std::size_t size() const { return experiences_.size(); }
    bool empty() const { return experiences_.empty(); }
    const Experience& operator[](std::size_t i) const { return experiences_[i]; }
    auto begin() const { return experiences_.begin(); }
    auto end() const { return experiences_.end(); }

    std::size_t obs_dim() const { return obs_dim_; }
    int num_actions() const { return num_actions_; }
    const std::string& env_id() const { return env_id_; }
    std::optional<std::size_t> capacity() const { return capacity_; }

    // Rewards in buffer order.
    std::vector<double> reward_vector() const;

    // Throws DimensionError / InvalidArgument if e does not fit this buffer.
    void validate_experience(const Experience& e) const;

    friend bool operator==(const ReplayBuffer&, const ReplayBuffer&) = default;

private:
    std::deque<Experience> experiences_;
    std::size_t obs_dim_;
    int num_actions_;
    std::string env_id_;
    std::optional<std::size_t> capacity_;
};

enum class Method { coreset, uniform, icdf, sensitivity, group };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct WeightedExperience {
    Experience exp;
    std::uint64_t weight = 1;

    friend bool operator==(const WeightedExperience&, const WeightedExperience&) = default;
};

// Weighted representative set produced by a compressor. Unpacking repeats
// each entry `weight` times, so weights always sum to original_size.
struct CompressedERB {
    std::vector<WeightedExperience> entries;
    Method method = Method::coreset;
    double ratio = 1.0;
    std::uint64_t original_size = 0;
    std::size_t obs_dim = 0;
    int num_actions = 0;
    std::string env_id;
    std::uint64_t seed = 0;

    std::uint64_t weight_sum() const;
    // Rewards of the representatives, one per entry; weights ignored.
    std::vector<double> reward_vector() const;
    // Throws FormatError when an invariant does not hold.
    void validate() const;

    friend bool operator==(const CompressedERB&, const CompressedERB&) = default;
};

// max(1, floor(n / ratio)) for n >= 1; 0 for n == 0. Methods that merge
// duplicate representatives may store fewer entries, never more.
std::uint64_t compressed_entry_target(std::uint64_t n, double ratio);

} // namespace erb
