#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace theta {

// SplitMix64 finaliser; used to derive independent substream seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of substream `index` under `master`. Distinct (master, index) pairs give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Worker count: THETA_THREADS if set and positive, otherwise hardware concurrency.
std::size_t default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. Iterations must be independent;
// callers write results into per-index slots and merge them in index order.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

} // namespace theta
