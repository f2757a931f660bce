#pragma once

#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

namespace p2pbandit {

/**
 * Exact bookkeeping of how much of each datum (source agent, source round)
 * every agent holds, mirroring the matrix buffers operation for operation.
 *
 * A datum's weight at a holder is the multiplicity with which its xxᵀ term
 * appears in the holder's active matrix (once flushed) or in one of its
 * buffer slots (while still mixing). Rounds are 1-based, agents 0-based.
 */
class WeightTrace {
 public:
  /// Largest V·T the trace accepts.
  static constexpr long long kMaxCells = 10000;

  /// Throws ConfigError when V·horizon exceeds kMaxCells.
  WeightTrace(int V, int horizon);

  int agents() const noexcept { return V_; }
  int horizon() const noexcept { return T_; }

  /// Every holder i replaces its slots with the elementwise mean of its own
  /// and partner[i]'s round-start slots. partner[i] == i leaves i untouched.
  void average(const std::vector<int>& partner);

  /// New newest slot at `holder` holding `weight` of datum (source, round).
  void append(int holder, int source, int round, double weight);

  /// Oldest slot of `holder` moves into its active ledger.
  void flush_front(int holder);

  /// Active ledger := the holder's own data of rounds ≤ through with weight
  /// 1; buffer := `pad` empty slots followed by one slot of that same data.
  void reset(int holder, int through, std::size_t pad);

  double active_weight(int holder, int source, int round) const;
  double buffer_weight(int holder, int source, int round) const;
  double weight(int holder, int source, int round) const {
    return active_weight(holder, source, round) + buffer_weight(holder, source, round);
  }

  /// Σ over holders of the datum's weight (active + buffered).
  double datum_total(int source, int round) const;

  /// Σ over source agents of the holder's active weights for one round.
  double active_source_sum(int holder, int round) const;

  std::size_t buffer_length(int holder) const { return buffers_[holder].size(); }

  /// Dense view of everything `holder` has (active + buffered), indexed by
  /// (round − 1)·V + source.
  std::vector<double> holdings(int holder) const;

  /// Smallest weight anywhere in the trace (ledgers and buffer slots).
  double min_weight() const;

 private:
  using Sparse = std::vector<std::pair<int, double>>;  // sorted by datum id

  int id(int source, int round) const { return (round - 1) * V_ + source; }
  void check(int source, int round) const;
  static Sparse mean(const Sparse& a, const Sparse& b);

  int V_;
  int T_;
  std::vector<std::deque<Sparse>> buffers_;
  std::vector<std::vector<double>> active_;
};

}  // namespace p2pbandit
