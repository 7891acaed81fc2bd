#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace collapse {

using Token = std::int32_t;
using TokenSequence = std::vector<Token>;

enum class Origin { real, synthetic, mixed };

struct Corpus {
  std::vector<TokenSequence> sequences;
  Origin origin = Origin::real;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }
  std::size_t token_count() const;
};

// Exactly one of `label` / `soft` is set.
struct FeatureExample {
  std::vector<double> features;
  std::optional<int> label;
  std::optional<std::vector<double>> soft;
};

struct LabeledSet {
  std::vector<FeatureExample> examples;
  Origin origin = Origin::real;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// Anchor contexts: token prefixes for the text learner, feature vectors for
// the classifier. Fixed for the lifetime of a run.
struct TextAnchors {
  std::vector<TokenSequence> items;
};

struct FeatureAnchors {
  std::vector<std::vector<double>> items;
};

}  // namespace collapse
