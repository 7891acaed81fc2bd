#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "collapse/markov_learner.hpp"
#include "collapse/softmax_classifier.hpp"

namespace collapse {

using AnyLearner = std::variant<MarkovTextLearner, SoftmaxClassifierLearner>;

struct Checkpoint {
  std::uint64_t generation = 0;
  AnyLearner learner;
  std::string rng_state;
};

inline constexpr std::uint32_t checkpoint_format_version = 1;

Checkpoint snapshot(const AnyLearner& learner, std::uint64_t generation, const Rng& rng);

std::vector<std::uint8_t> serialize(const Checkpoint& ck);
Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n);

}  // namespace collapse
