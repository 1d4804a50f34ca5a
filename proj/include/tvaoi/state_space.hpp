#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tvaoi {

/// Largest supported class count; the state space has 1 + N * 2^N states.
inline constexpr int kMaxClasses = 10;

/// Server/buffer configuration of the queue.
///
/// `in_service` is 0 when the server is idle, otherwise the 1-based class
/// being served. Bit (i-1) of `buffers` is set when class i has a packet
/// waiting. The idle state is canonical: an idle server never has waiting
/// packets, and the constructor rejects anything else.
class SystemState {
 public:
  SystemState() = default;
  SystemState(int in_service, std::uint32_t buffers);

  static SystemState idle() { return {}; }

  int in_service() const noexcept { return in_service_; }
  std::uint32_t buffers() const noexcept { return buffers_; }
  bool is_idle() const noexcept { return in_service_ == 0; }

  /// Occupancy of the class-`k` buffer, k in 1..N.
  bool waiting(int k) const noexcept { return ((buffers_ >> (k - 1)) & 1U) != 0; }

  std::string to_string(int n_classes) const;

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  int in_service_ = 0;
  std::uint32_t buffers_ = 0;
};

/// Highest-priority (lowest index) class with a waiting packet, or 0.
int next_class(const SystemState& s) noexcept;

/// State right after a service completion in `s`. Throws std::logic_error on
/// the idle state.
SystemState completion_target(const SystemState& s);

/// State right after a class-`k` arrival. Replacement arrivals return `s`.
SystemState arrival_target(const SystemState& s, int k);

/// Enumerated state space of an N-class latest-only priority queue.
///
/// States are stored in index order, so `position(s) == index_of(s) - 1`.
/// `index_of` is the 1-based closed-form index; `position` is the 0-based
/// offset used by every vector and matrix in the library.
class StateSpace {
 public:
  explicit StateSpace(int n_classes);

  int n_classes() const noexcept { return n_classes_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<SystemState>& states() const noexcept { return states_; }
  const SystemState& operator[](std::size_t pos) const { return states_[pos]; }

  /// Closed-form 1-based index. Throws std::invalid_argument for states
  /// that do not belong to this space.
  std::size_t index_of(const SystemState& s) const;
  std::size_t position(const SystemState& s) const { return index_of(s) - 1; }

  // Structural maps, precomputed per position.
  int next_at(std::size_t pos) const { return next_[pos]; }
  /// Position of the post-completion state; only meaningful for busy states.
  std::size_t completion_target_at(std::size_t pos) const { return completion_[pos]; }
  /// Position reached by a class-k arrival (k in 1..N).
  std::size_t arrival_target_at(std::size_t pos, int k) const {
    return arrival_[pos * static_cast<std::size_t>(n_classes_) + static_cast<std::size_t>(k - 1)];
  }

 private:
  int n_classes_;
  std::vector<SystemState> states_;
  std::vector<int> next_;
  std::vector<std::size_t> completion_;
  std::vector<std::size_t> arrival_;
};

/// Builds the state space; throws ConfigError unless 1 <= n_classes <= 10.
StateSpace enumerate_states(int n_classes);

}  // namespace tvaoi
