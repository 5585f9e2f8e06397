#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace resochain {

/// One subwavelength resonator: its length, the gap to the next resonator and
/// its interior wave speed. All three are strictly positive and finite.
struct Resonator {
  double length = 1.0;
  double spacing = 1.0;
  double wave_speed = 1.0;

  Resonator() = default;
  Resonator(double length, double spacing, double wave_speed);

  friend bool operator==(const Resonator&, const Resonator&) = default;
};

/// Nonempty ordered run of resonators.
class Block {
 public:
  explicit Block(std::vector<Resonator> resonators);

  std::span<const Resonator> resonators() const noexcept { return resonators_; }
  std::size_t size() const noexcept { return resonators_.size(); }
  const Resonator& operator[](std::size_t i) const { return resonators_.at(i); }

  friend bool operator==(const Block&, const Block&) = default;

 private:
  std::vector<Resonator> resonators_;
};

/// D blocks together with their sampling probabilities (positive, summing to 1).
class BlockLibrary {
 public:
  BlockLibrary(std::vector<Block> blocks, std::vector<double> probabilities);
  /// Uniform probabilities.
  explicit BlockLibrary(std::vector<Block> blocks);

  std::size_t size() const noexcept { return blocks_.size(); }
  const Block& block(int label) const;  // 1-based label
  std::span<const Block> blocks() const noexcept { return blocks_; }
  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::size_t max_block_length() const noexcept;

  friend bool operator==(const BlockLibrary&, const BlockLibrary&) = default;

 private:
  std::vector<Block> blocks_;
  std::vector<double> probabilities_;
};

/// The single-resonator block (l = s = 2) and the dimer (l = 1, s = 1, 2)
/// with all wave speeds 1, sampled with equal probability.
BlockLibrary standard_library();

struct IidSample {
  std::uint64_t seed;
  friend bool operator==(const IidSample&, const IidSample&) = default;
};
struct PseudoErgodicWord {
  int depth;
  friend bool operator==(const PseudoErgodicWord&, const PseudoErgodicWord&) = default;
};
struct Explicit {
  friend bool operator==(const Explicit&, const Explicit&) = default;
};
using Provenance = std::variant<IidSample, PseudoErgodicWord, Explicit>;

/// Block labels in {1, ..., D}. Labels are checked against a library when
/// they meet one (expand_blocks), not at construction.
struct BlockSequence {
  std::vector<int> labels;
  Provenance provenance = Explicit{};

  std::size_t size() const noexcept { return labels.size(); }
  friend bool operator==(const BlockSequence&, const BlockSequence&) = default;
};

/// Flattened resonator chain with the start index of every block.
struct ResonatorSequence {
  std::vector<Resonator> resonators;
  std::vector<std::size_t> block_offsets;

  std::size_t size() const noexcept { return resonators.size(); }
};

/// SplitMix64: output k of seed s is mix(s + (k+1) * 0x9E3779B97F4A7C15).
/// The counter form makes streams reproducible bit-for-bit on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

ResonatorSequence expand_blocks(const BlockLibrary& library, const BlockSequence& seq);

BlockSequence sample_iid(const BlockLibrary& library, std::size_t count, std::uint64_t seed);
/// Same as above but drawing from a caller-owned generator.
BlockSequence sample_iid(const BlockLibrary& library, std::size_t count, SplitMix64& rng);

/// Linearised de Bruijn word: contains every word of length <= depth over
/// {1..alphabet} as a contiguous factor; length alphabet^depth + depth - 1.
BlockSequence pseudo_ergodic_word(int alphabet, int depth);

bool contains_all_words(const BlockSequence& seq, int alphabet, int depth);

/// Row-stochastic transition matrix of the resonator-state Markov chain.
/// States are (d, r) ordered block by block, resonator by resonator.
Eigen::MatrixXd transition_matrix(const BlockLibrary& library);

}  // namespace resochain
