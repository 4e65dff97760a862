#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "logvol/rng.hpp"

namespace logvol {

// Fills count values; value i is draw(gen) with gen = stream.substream(i), so the
// result is identical for every worker count. The first exception is rethrown.
template <class Draw>
std::vector<double> generate(std::size_t count, RngStream stream, unsigned workers, Draw&& draw) {
    std::vector<double> out(count);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Generator g = stream.substream(i);
            out[i] = draw(g);
        }
    };
    if (workers == 1) {
        run(0, count);
        return out;
    }
    std::exception_ptr first;
    std::mutex guard;
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk, end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                run(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!first) first = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
    return out;
}

}  // namespace logvol
