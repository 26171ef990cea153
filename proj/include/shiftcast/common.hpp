#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace shiftcast {

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MissingStreamError final : Error { using Error::Error; };
struct FormatError final : Error { using Error::Error; };
struct ValidationError final : Error { using Error::Error; };
struct IoError final : Error { using Error::Error; };
struct OutOfFieldError final : Error { using Error::Error; };
struct MapsAbsentError final : Error { using Error::Error; };
struct MissingDataError final : Error { using Error::Error; };
struct WindowOutOfRangeError final : Error { using Error::Error; };
struct SingleClassError final : Error { using Error::Error; };
struct TooFewParticipantsError final : Error { using Error::Error; };
struct DegenerateDataError final : Error { using Error::Error; };
struct SchemaMismatchError final : Error { using Error::Error; };
struct LengthMismatchError final : Error { using Error::Error; };
struct OutOfRangeError final : Error { using Error::Error; };
struct ConfigError final : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

// All randomness in the library is derived from user-visible seeds through
// these mixers, so results do not depend on std::hash or thread scheduling.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent sub-seed from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701ULL));
}

/// FNV-1a over a string; platform-independent replacement for std::hash.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, const std::string& key) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(key));
}

// ---------------------------------------------------------------------------
// Deterministic parallel map
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n). Each index writes only to its own output slot,
/// so the result is identical for any worker count.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned count = static_cast<unsigned>(
      std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(count);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += count) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

}  // namespace shiftcast
