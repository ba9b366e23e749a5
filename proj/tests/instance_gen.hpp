#pragma once

// Random feasible instances for property tests: U <= 3 clusters, V_u <= 4
// users, K <= 6 datasets. Feasibility is guaranteed by construction, not by
// rejection: every dataset is limited to at most U-1 clusters and the
// straggler/colluder budgets are drawn inside the admissible ranges.

#include <algorithm>
#include <vector>

#include "hsa/field.hpp"
#include "hsa/topology.hpp"

namespace hsa_test {

struct InstanceSpec {
    hsa::Assignment assignment;
    std::vector<int> s2;
    std::vector<int> T;
};

inline InstanceSpec random_feasible_instance(hsa::Rng& rng) {
    using hsa::Assignment;
    for (;;) {
        int U = 2 + static_cast<int>(rng.uniform_below(2)); // 2..3
        int K = 2 + static_cast<int>(rng.uniform_below(5)); // 2..6
        Assignment a;
        a.K = K;
        a.holds.assign(U, {});
        std::vector<std::vector<int>> cluster_sets(U);
        for (int k = 0; k < K; ++k) {
            // Each dataset goes to 1..U-1 clusters, never all of them.
            int copies = 1 + static_cast<int>(rng.uniform_below(U - 1));
            std::vector<int> ids(U);
            for (int u = 0; u < U; ++u) ids[u] = u;
            for (int i = 0; i < copies; ++i) {
                int j = i + static_cast<int>(rng.uniform_below(ids.size() - i));
                std::swap(ids[i], ids[j]);
                cluster_sets[ids[i]].push_back(k);
            }
        }
        bool empty_cluster = false;
        for (int u = 0; u < U; ++u) empty_cluster = empty_cluster || cluster_sets[u].empty();
        if (empty_cluster) continue;

        for (int u = 0; u < U; ++u) {
            int V = 1 + static_cast<int>(rng.uniform_below(4)); // 1..4
            a.holds[u].assign(V, {});
            for (int k : cluster_sets[u]) {
                // Each cluster dataset lands on a nonempty random user subset.
                int picks = 1 + static_cast<int>(rng.uniform_below(V));
                std::vector<int> users(V);
                for (int v = 0; v < V; ++v) users[v] = v;
                for (int i = 0; i < picks; ++i) {
                    int j = i + static_cast<int>(rng.uniform_below(users.size() - i));
                    std::swap(users[i], users[j]);
                    a.holds[u][users[i]].push_back(k);
                }
            }
            for (int v = 0; v < V; ++v) {
                if (a.holds[u][v].empty())
                    a.holds[u][v].push_back(
                        cluster_sets[u][rng.uniform_below(cluster_sets[u].size())]);
                std::sort(a.holds[u][v].begin(), a.holds[u][v].end());
                a.holds[u][v].erase(std::unique(a.holds[u][v].begin(), a.holds[u][v].end()),
                                    a.holds[u][v].end());
            }
        }

        hsa::DerivedParams probe = hsa::derive_params(a, std::vector<int>(U, 0),
                                                      std::vector<int>(U, 0));
        InstanceSpec spec;
        spec.assignment = a;
        for (int u = 0; u < U; ++u) {
            int s2 = static_cast<int>(rng.uniform_below(probe.r2[u])); // < r2
            int t_max = probe.V[u] - probe.r2[u];
            int T = t_max > 0 ? static_cast<int>(rng.uniform_below(t_max + 1)) : 0;
            spec.s2.push_back(s2);
            spec.T.push_back(T);
        }
        return spec;
    }
}

} // namespace hsa_test
