#include "perceptlab/threading.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace perceptlab {

int thread_cap() {
    const char* env = std::getenv("PERCEPTLAB_THREADS");
    if (env == nullptr) return 0;
    try {
        int v = std::stoi(env);
        return v < 0 ? 0 : v;
    } catch (...) {
        return 0;
    }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int cap = thread_cap();
    if (cap <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cap), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace perceptlab
