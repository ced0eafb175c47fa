#pragma once

// Batched-feedback channel: rewards are drawn at pull time but withheld from
// the decision maker until the batch commits. Reading an uncommitted reward
// is a contract violation and throws.

#include <cstdint>
#include <vector>

#include "blin/environments.hpp"
#include "blin/errors.hpp"
#include "blin/geometry.hpp"

namespace blin {

/// Source of reward draws, consumed strictly in pull order.
struct RewardSource {
  virtual ~RewardSource() = default;
  virtual double draw(const Point& arm) = 0;
};

class InstanceRewardSource final : public RewardSource {
 public:
  InstanceRewardSource(const RewardInstance& inst, const NoiseModel& noise)
      : inst_(inst), stream_(noise) {}
  double draw(const Point& arm) override { return sample_reward(inst_, stream_, arm); }

 private:
  const RewardInstance& inst_;
  GaussianStream stream_;
};

/// Replays a recorded reward sequence (for the feedback-isolation verifier).
class ReplayRewardSource final : public RewardSource {
 public:
  explicit ReplayRewardSource(const std::vector<double>& rewards) : rewards_(rewards) {}
  double draw(const Point&) override {
    if (pos_ >= rewards_.size()) throw ContractViolation("replay source exhausted");
    return rewards_[pos_++];
  }

 private:
  const std::vector<double>& rewards_;
  std::size_t pos_ = 0;
};

class BatchedChannel {
 public:
  BatchedChannel(RewardSource& source, std::int64_t horizon)
      : source_(&source), horizon_(horizon) {
    if (horizon < 2) throw ConfigError("invalid horizon: T must be >= 2");
  }

  std::int64_t time() const { return static_cast<std::int64_t>(rewards_.size()); }
  std::int64_t horizon() const { return horizon_; }
  bool exhausted() const { return time() == horizon_; }
  bool has_uncommitted() const { return committed_ < time(); }
  int commits() const { return static_cast<int>(grid_.size()); }
  const std::vector<std::int64_t>& grid() const { return grid_; }

  void play(int cube_slot, const Point& arm) {
    if (exhausted()) throw ContractViolation("pull past the horizon");
    cube_slots_.push_back(cube_slot);
    rewards_.push_back(source_->draw(arm));
  }

  /// One communication round: everything played so far becomes readable.
  void commit() {
    if (!has_uncommitted()) throw ContractViolation("commit without new pulls");
    committed_ = time();
    grid_.push_back(committed_);
  }

  double reward(std::int64_t t) const {
    if (t < 0 || t >= committed_)
      throw ContractViolation("reading a reward before its batch committed");
    return rewards_[static_cast<std::size_t>(t)];
  }

  int cube_slot(std::int64_t t) const { return cube_slots_[static_cast<std::size_t>(t)]; }

 private:
  RewardSource* source_;
  std::int64_t horizon_;
  std::vector<int> cube_slots_;
  std::vector<double> rewards_;
  std::int64_t committed_ = 0;
  std::vector<std::int64_t> grid_;
};

}  // namespace blin
