// SPDX-License-Identifier: Apache-2.0
//
// isac-toolkit: design and evaluation of integrated sensing and communication
// Copyright (C) 2026 isac-toolkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isac/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isac
{
    namespace
    {
        std::atomic<int> g_threads{1};
    }

    std::uint64_t Rng::split_seed(std::uint64_t master, std::uint64_t index)
    {
        // splitmix64 over (master, index)
        std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    int default_threads() { return g_threads.load(); }

    void set_default_threads(int threads) { g_threads.store(std::max(1, threads)); }

    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body)
    {
        const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            pool.emplace_back([&]
                              {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error)
                            first_error = std::current_exception();
                    }
                } });
        }
        for (auto &t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }
}
