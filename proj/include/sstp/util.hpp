// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSTP_UTIL_HPP_
#define SSTP_UTIL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace sstp
{

/// 64-bit FNV-1a, used for provenance fingerprints of files.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL)
{
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

/// Reads a whole file; throws Error(kIo) when it cannot be opened.
std::string read_file_bytes(const std::string & path);

/// FNV-1a over the file's bytes, hex encoded.
std::string file_fingerprint(const std::string & path);

/// Worker count from an explicit request, else SSTP_THREADS, else 1.
std::size_t resolve_threads(std::size_t requested);

/**
 * Runs fn(i) for i in [0, n) on up to `threads` workers in contiguous
 * chunks. Callers write only to slot i, so results do not depend on the
 * worker count.
 */
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn && fn)
{
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(threads);
  workers.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) {
      break;
    }
    workers.emplace_back([begin, end, t, &fn, &failures] {
      try {
        for (std::size_t i = begin; i < end; ++i) {
          fn(i);
        }
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto & w : workers) {
    w.join();
  }
  // The lowest failing chunk wins, matching what a serial run would raise.
  for (auto & f : failures) {
    if (f) {
      std::rethrow_exception(f);
    }
  }
}

}  // namespace sstp

#endif  // SSTP_UTIL_HPP_
