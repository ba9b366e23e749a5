#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsa/field.hpp"

namespace hsa {

/// k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int n, int k);

/// All subsets of {0..n-1} with size <= max_size, ordered by size then lex.
std::vector<std::vector<int>> subsets_up_to_size(int n, int max_size);

/// Number of k-subsets, saturating at cap+1 to keep comparisons cheap.
long long count_subsets(int n, int k, long long cap);

/// Uniform random k-subset of {0..n-1}, returned sorted.
std::vector<int> sample_subset(int n, int k, Rng& rng);

/// Cartesian product over per-cluster choice lists. Visits tuples in
/// lexicographic order; when the product exceeds `cap`, visits `samples`
/// uniformly random tuples instead (duplicates possible).
void for_each_tuple(const std::vector<std::vector<std::vector<int>>>& choices, long long cap,
                    int samples, Rng& rng,
                    const std::function<void(const std::vector<std::vector<int>>&)>& fn);

} // namespace hsa
