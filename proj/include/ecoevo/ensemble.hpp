#pragma once
// Replicate runner.  Workers pull replicate indices from a shared counter and
// the body writes results into caller-owned, index-addressed slots, so the
// aggregate is identical for any worker count; per-replicate seeds derive from
// the master seed and the replicate index alone.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ecoevo/rng.hpp"

namespace ecoevo {

/// body(replicate_index, derived_seed) is called exactly once per replicate.
template <typename Body>
void run_ensemble(int replicates, int workers, Body&& body, std::uint64_t master_seed) {
    if (workers <= 1) {
        for (int r = 0; r < replicates; ++r)
            body(r, derive_stream(master_seed, static_cast<std::uint64_t>(r)));
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mu;
    auto work = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replicates) return;
            try {
                body(r, derive_stream(master_seed, static_cast<std::uint64_t>(r)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ecoevo
