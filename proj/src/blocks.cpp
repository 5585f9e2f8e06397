#include "resochain/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "resochain/errors.hpp"

namespace resochain {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

Resonator::Resonator(double length, double spacing, double wave_speed)
    : length(length), spacing(spacing), wave_speed(wave_speed) {
  if (!positive_finite(length) || !positive_finite(spacing) || !positive_finite(wave_speed)) {
    throw ValidationError("resonator parameters must be positive and finite");
  }
}

Block::Block(std::vector<Resonator> resonators) : resonators_(std::move(resonators)) {
  if (resonators_.empty()) throw ValidationError("a block needs at least one resonator");
}

BlockLibrary::BlockLibrary(std::vector<Block> blocks, std::vector<double> probabilities)
    : blocks_(std::move(blocks)), probabilities_(std::move(probabilities)) {
  if (blocks_.empty()) throw ValidationError("a block library needs at least one block");
  if (probabilities_.size() != blocks_.size()) {
    throw ValidationError("one sampling probability per block is required");
  }
  for (double p : probabilities_) {
    if (!positive_finite(p)) throw ValidationError("sampling probabilities must be positive");
  }
  const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("sampling probabilities must sum to 1");
  }
}

BlockLibrary::BlockLibrary(std::vector<Block> blocks)
    : BlockLibrary(blocks, std::vector<double>(blocks.size(), blocks.empty() ? 0.0 : 1.0 / blocks.size())) {}

const Block& BlockLibrary::block(int label) const {
  if (label < 1 || static_cast<std::size_t>(label) > blocks_.size()) {
    throw ValidationError("block label " + std::to_string(label) + " outside 1.." +
                          std::to_string(blocks_.size()));
  }
  return blocks_[static_cast<std::size_t>(label - 1)];
}

std::size_t BlockLibrary::max_block_length() const noexcept {
  std::size_t n = 0;
  for (const auto& b : blocks_) n = std::max(n, b.size());
  return n;
}

BlockLibrary standard_library() {
  return BlockLibrary({Block({Resonator(2.0, 2.0, 1.0)}),
                       Block({Resonator(1.0, 1.0, 1.0), Resonator(1.0, 2.0, 1.0)})},
                      {0.5, 0.5});
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

ResonatorSequence expand_blocks(const BlockLibrary& library, const BlockSequence& seq) {
  ResonatorSequence out;
  out.block_offsets.reserve(seq.size());
  for (int label : seq.labels) {
    const Block& b = library.block(label);
    out.block_offsets.push_back(out.resonators.size());
    out.resonators.insert(out.resonators.end(), b.resonators().begin(), b.resonators().end());
  }
  return out;
}

BlockSequence sample_iid(const BlockLibrary& library, std::size_t count, SplitMix64& rng) {
  const auto probs = library.probabilities();
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());

  BlockSequence seq;
  seq.labels.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto d = std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                            static_cast<std::ptrdiff_t>(probs.size()) - 1);
    seq.labels.push_back(static_cast<int>(d) + 1);
  }
  return seq;
}

BlockSequence sample_iid(const BlockLibrary& library, std::size_t count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  BlockSequence seq = sample_iid(library, count, rng);
  seq.provenance = IidSample{seed};
  return seq;
}

BlockSequence pseudo_ergodic_word(int alphabet, int depth) {
  if (alphabet < 1 || depth < 1) throw ValidationError("alphabet and depth must be >= 1");

  // Lyndon-word (FKM) construction of the cyclic de Bruijn sequence B(alphabet, depth).
  std::vector<int> cyclic;
  std::vector<int> a(static_cast<std::size_t>(depth) + 1, 0);
  auto db = [&](auto&& self, int t, int p) -> void {
    if (t > depth) {
      if (depth % p == 0) {
        for (int j = 1; j <= p; ++j) cyclic.push_back(a[static_cast<std::size_t>(j)]);
      }
      return;
    }
    a[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t - p)];
    self(self, t + 1, p);
    for (int j = a[static_cast<std::size_t>(t - p)] + 1; j < alphabet; ++j) {
      a[static_cast<std::size_t>(t)] = j;
      self(self, t + 1, t);
    }
  };
  db(db, 1, 1);

  BlockSequence seq;
  seq.provenance = PseudoErgodicWord{depth};
  seq.labels.reserve(cyclic.size() + static_cast<std::size_t>(depth) - 1);
  for (int c : cyclic) seq.labels.push_back(c + 1);
  for (int j = 0; j + 1 < depth; ++j) seq.labels.push_back(cyclic[static_cast<std::size_t>(j) % cyclic.size()] + 1);
  return seq;
}

bool contains_all_words(const BlockSequence& seq, int alphabet, int depth) {
  if (alphabet < 1 || depth < 1) return true;
  const auto& w = seq.labels;
  for (int len = 1; len <= depth; ++len) {
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i + static_cast<std::size_t>(len) <= w.size(); ++i) {
      std::vector<int> factor(w.begin() + static_cast<std::ptrdiff_t>(i),
                              w.begin() + static_cast<std::ptrdiff_t>(i) + len);
      if (std::all_of(factor.begin(), factor.end(), [&](int c) { return c >= 1 && c <= alphabet; })) {
        seen.insert(std::move(factor));
      }
    }
    double needed = std::pow(static_cast<double>(alphabet), len);
    if (static_cast<double>(seen.size()) < needed) return false;
  }
  return true;
}

Eigen::MatrixXd transition_matrix(const BlockLibrary& library) {
  std::vector<std::size_t> first;  // state index of (d, 1)
  std::size_t states = 0;
  for (const auto& b : library.blocks()) {
    first.push_back(states);
    states += b.size();
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states),
                                            static_cast<Eigen::Index>(states));
  const auto probs = library.probabilities();
  for (std::size_t d = 0; d < library.size(); ++d) {
    const std::size_t len = library.blocks()[d].size();
    for (std::size_t r = 0; r < len; ++r) {
      const auto row = static_cast<Eigen::Index>(first[d] + r);
      if (r + 1 < len) {
        p(row, row + 1) = 1.0;
      } else {
        for (std::size_t e = 0; e < library.size(); ++e) {
          p(row, static_cast<Eigen::Index>(first[e])) = probs[e];
        }
      }
    }
  }
  return p;
}

}  // namespace resochain
