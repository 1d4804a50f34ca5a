#include "tvaoi/state_space.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "tvaoi/error.hpp"

namespace tvaoi {

SystemState::SystemState(int in_service, std::uint32_t buffers)
    : in_service_(in_service), buffers_(buffers) {
  if (in_service < 0 || in_service > kMaxClasses) {
    throw std::invalid_argument("SystemState: class in service out of range");
  }
  if (in_service == 0 && buffers != 0) {
    throw std::invalid_argument("SystemState: idle server with waiting packets");
  }
}

std::string SystemState::to_string(int n_classes) const {
  std::ostringstream os;
  os << '(' << in_service_;
  for (int k = 1; k <= n_classes; ++k) os << ',' << (waiting(k) ? 1 : 0);
  os << ')';
  return os.str();
}

int next_class(const SystemState& s) noexcept {
  if (s.buffers() == 0) return 0;
  return std::countr_zero(s.buffers()) + 1;
}

SystemState completion_target(const SystemState& s) {
  if (s.is_idle()) throw std::logic_error("completion_target: idle state has no service");
  const int next = next_class(s);
  if (next == 0) return SystemState::idle();
  return {next, s.buffers() & ~(1U << (next - 1))};
}

SystemState arrival_target(const SystemState& s, int k) {
  if (s.is_idle()) return {k, 0U};
  return {s.in_service(), s.buffers() | (1U << (k - 1))};
}

StateSpace::StateSpace(int n_classes) : n_classes_(n_classes) {
  if (n_classes < 1 || n_classes > kMaxClasses) {
    throw ConfigError("class count must be in 1.." + std::to_string(kMaxClasses) + ", got " +
                      std::to_string(n_classes));
  }
  const std::uint32_t n_masks = 1U << n_classes;
  states_.reserve(1 + static_cast<std::size_t>(n_classes) * n_masks);
  states_.push_back(SystemState::idle());
  for (int j = 1; j <= n_classes; ++j) {
    for (std::uint32_t b = 0; b < n_masks; ++b) states_.emplace_back(j, b);
  }

  const std::size_t n = states_.size();
  next_.resize(n);
  completion_.assign(n, 0);
  arrival_.resize(n * static_cast<std::size_t>(n_classes));
  for (std::size_t pos = 0; pos < n; ++pos) {
    const SystemState& s = states_[pos];
    next_[pos] = next_class(s);
    if (!s.is_idle()) completion_[pos] = position(completion_target(s));
    for (int k = 1; k <= n_classes; ++k) {
      arrival_[pos * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(k - 1)] =
          position(arrival_target(s, k));
    }
  }
}

std::size_t StateSpace::index_of(const SystemState& s) const {
  if (s.in_service() > n_classes_ || (s.buffers() >> n_classes_) != 0) {
    throw std::invalid_argument("StateSpace::index_of: state outside the space");
  }
  if (s.is_idle()) return 1;
  return 2 + (static_cast<std::size_t>(s.in_service() - 1) << n_classes_) + s.buffers();
}

StateSpace enumerate_states(int n_classes) { return StateSpace(n_classes); }

}  // namespace tvaoi
