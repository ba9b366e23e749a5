#include "hsa/enumerate.hpp"

#include <algorithm>

namespace hsa {

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    if (k == 0) out = {{}};
    return out;
}

std::vector<std::vector<int>> subsets_up_to_size(int n, int max_size) {
    std::vector<std::vector<int>> out;
    for (int k = 0; k <= std::min(n, max_size); ++k) {
        auto part = subsets_of_size(n, k);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

long long count_subsets(int n, int k, long long cap) {
    if (k < 0 || k > n) return 0;
    long long c = 1;
    for (int i = 0; i < k; ++i) {
        c = c * (n - i) / (i + 1);
        if (c > cap) return cap + 1;
    }
    return c;
}

std::vector<int> sample_subset(int n, int k, Rng& rng) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

void for_each_tuple(const std::vector<std::vector<std::vector<int>>>& choices, long long cap,
                    int samples, Rng& rng,
                    const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
    long long total = 1;
    for (const auto& c : choices) {
        total *= static_cast<long long>(c.size());
        if (total > cap || total == 0) break;
    }
    std::vector<std::vector<int>> tuple(choices.size());
    if (total == 0) return;
    if (total <= cap) {
        std::vector<std::size_t> idx(choices.size(), 0);
        for (;;) {
            for (std::size_t u = 0; u < choices.size(); ++u) tuple[u] = choices[u][idx[u]];
            fn(tuple);
            std::size_t pos = choices.size();
            while (pos > 0) {
                --pos;
                if (++idx[pos] < choices[pos].size()) break;
                idx[pos] = 0;
                if (pos == 0) return;
            }
            if (choices.empty()) return;
        }
    }
    for (int s = 0; s < samples; ++s) {
        for (std::size_t u = 0; u < choices.size(); ++u)
            tuple[u] = choices[u][rng.uniform_below(choices[u].size())];
        fn(tuple);
    }
}

} // namespace hsa
