#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "rsmc/rng.hpp"

namespace rsmc {

// Threading knobs for Monte Carlo loops. Results never depend on `threads`:
// trials are cut into fixed-size blocks, each block owns an RNG stream
// derived from its index, and block partials are folded in block order.
struct ParallelConfig {
  int threads = 1;
  std::uint64_t block_size = 4096;

  static ParallelConfig single() { return {1, 4096}; }
};

// Runs body(block_index, trial_begin, trial_end, rng) over all trials.
// Block b draws from a generator derived from (master_seed, stream, salt, b),
// so distinct statistics (salts) and caller streams never share draws. Every
// worker thread operates on its own copy of `body`, so mutable lambda state
// acts as per-thread scratch and must be fully rewritten per trial.
template <typename Body>
void run_blocked(std::uint64_t trials, const SeedSpec& seed, std::uint64_t salt,
                 const ParallelConfig& par, Body body) {
  if (trials == 0) return;
  const std::uint64_t bs = par.block_size > 0 ? par.block_size : 4096;
  const std::uint64_t n_blocks = (trials + bs - 1) / bs;

  auto run_block = [&](Body& b_body, std::uint64_t b) {
    const std::uint64_t begin = b * bs;
    const std::uint64_t end = std::min(trials, begin + bs);
    SplitMix64 rng =
        make_rng(seed, salt ^ detail::mix64(0x517cc1b727220a95ULL + b));
    b_body(b, begin, end, rng);
  };

  const int threads = par.threads > 1 ? par.threads : 1;
  if (threads == 1 || n_blocks == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(body, b);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, local = body]() mutable {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        run_block(local, b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Convenience: one partial accumulator per block, merged in block order.
// Partial must be default-constructible and expose merge(const Partial&).
template <typename Partial, typename Body>
Partial reduce_blocked(std::uint64_t trials, const SeedSpec& seed,
                       std::uint64_t salt, const ParallelConfig& par,
                       Body body) {
  if (trials == 0) return Partial{};
  const std::uint64_t bs = par.block_size > 0 ? par.block_size : 4096;
  const std::uint64_t n_blocks = (trials + bs - 1) / bs;
  std::vector<Partial> partials(static_cast<std::size_t>(n_blocks));
  run_blocked(trials, seed, salt, par,
              [&partials, body](std::uint64_t b, std::uint64_t begin,
                                std::uint64_t end, SplitMix64& rng) mutable {
                Partial& p = partials[static_cast<std::size_t>(b)];
                for (std::uint64_t t = begin; t < end; ++t) body(p, t, rng);
              });
  Partial total;
  for (const Partial& p : partials) total.merge(p);
  return total;
}

}  // namespace rsmc
