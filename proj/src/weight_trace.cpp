#include "p2pbandit/weight_trace.hpp"

#include <algorithm>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

WeightTrace::WeightTrace(int V, int horizon) : V_(V), T_(horizon) {
  if (V < 1 || horizon < 1) throw ConfigError("weight tracking needs V >= 1 and T >= 1");
  if (static_cast<long long>(V) * horizon > kMaxCells)
    throw ConfigError("weight tracking is limited to V*T <= " + std::to_string(kMaxCells));
  buffers_.resize(static_cast<std::size_t>(V));
  active_.assign(static_cast<std::size_t>(V), std::vector<double>(static_cast<std::size_t>(V) * horizon, 0.0));
}

void WeightTrace::check(int source, int round) const {
  if (source < 0 || source >= V_ || round < 1 || round > T_) throw InputError("WeightTrace: datum out of range");
}

WeightTrace::Sparse WeightTrace::mean(const Sparse& a, const Sparse& b) {
  Sparse out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.emplace_back(ia->first, 0.5 * ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, 0.5 * ib->second);
      ++ib;
    } else {
      out.emplace_back(ia->first, 0.5 * (ia->second + ib->second));
      ++ia;
      ++ib;
    }
  }
  return out;
}

void WeightTrace::average(const std::vector<int>& partner) {
  if (partner.size() != buffers_.size()) throw ProtocolError("WeightTrace::average: partner list size");
  const auto snapshot = buffers_;
  for (int i = 0; i < V_; ++i) {
    const int j = partner[i];
    if (j == i) continue;
    const auto& mine = snapshot[i];
    const auto& theirs = snapshot[j];
    if (mine.size() != theirs.size()) throw ProtocolError("WeightTrace::average: buffer length mismatch");
    for (std::size_t k = 0; k < mine.size(); ++k) buffers_[i][k] = mean(mine[k], theirs[k]);
  }
}

void WeightTrace::append(int holder, int source, int round, double weight) {
  check(source, round);
  buffers_[holder].push_back(Sparse{{id(source, round), weight}});
}

void WeightTrace::flush_front(int holder) {
  auto& buf = buffers_[holder];
  if (buf.empty()) throw ProtocolError("WeightTrace::flush_front: empty buffer");
  for (const auto& [key, w] : buf.front()) active_[holder][key] += w;
  buf.pop_front();
}

void WeightTrace::reset(int holder, int through, std::size_t pad) {
  auto& ledger = active_[holder];
  std::fill(ledger.begin(), ledger.end(), 0.0);
  Sparse own;
  for (int r = 1; r <= std::min(through, T_); ++r) {
    ledger[id(holder, r)] = 1.0;
    own.emplace_back(id(holder, r), 1.0);
  }
  auto& buf = buffers_[holder];
  buf.assign(pad, Sparse{});
  buf.push_back(std::move(own));
}

double WeightTrace::active_weight(int holder, int source, int round) const {
  check(source, round);
  return active_[holder][id(source, round)];
}

double WeightTrace::buffer_weight(int holder, int source, int round) const {
  check(source, round);
  const int key = id(source, round);
  double total = 0.0;
  for (const auto& slot : buffers_[holder]) {
    auto it = std::lower_bound(slot.begin(), slot.end(), std::make_pair(key, -1e300));
    if (it != slot.end() && it->first == key) total += it->second;
  }
  return total;
}

std::vector<double> WeightTrace::holdings(int holder) const {
  std::vector<double> out = active_[holder];
  for (const auto& slot : buffers_[holder])
    for (const auto& [key, w] : slot) out[key] += w;
  return out;
}

double WeightTrace::min_weight() const {
  double lo = 0.0;
  for (const auto& ledger : active_) lo = std::min(lo, *std::min_element(ledger.begin(), ledger.end()));
  for (const auto& buf : buffers_)
    for (const auto& slot : buf)
      for (const auto& entry : slot) lo = std::min(lo, entry.second);
  return lo;
}

double WeightTrace::datum_total(int source, int round) const {
  double total = 0.0;
  for (int h = 0; h < V_; ++h) total += weight(h, source, round);
  return total;
}

double WeightTrace::active_source_sum(int holder, int round) const {
  double total = 0.0;
  for (int s = 0; s < V_; ++s) total += active_weight(holder, s, round);
  return total;
}

}  // namespace p2pbandit
