#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsa/matrix.hpp"
#include "hsa/topology.hpp"

namespace hsa {

/// Inter-cluster layer. F = [A; V] stacks the aggregation rows A over the
/// solved virtual-demand rows V; F1 = S1 * F carries one task block of
/// m/m1 rows per relay, and B1 is the key mixing matrix every relay task
/// absorbs.
struct RelayCode {
    Matrix S1;       ///< square, invertible
    Matrix F;        ///< (U*m/m1) x (K*m)
    Matrix F1;       ///< S1 * F
    Matrix B1;       ///< (U*m/m1) x key_count
    Matrix sinv_top; ///< first m rows of S1^{-1}; the server's decoder
    Matrix Q;        ///< right null-space basis of sinv_top

    Matrix aggregation_rows() const { return F.row_slice(0, sinv_top.rows()); }
    Matrix virtual_rows() const { return F.row_slice(sinv_top.rows(), F.rows()); }
};

/// Intra-cluster layer for one cluster: per-user sampling blocks S2 over the
/// task matrix [F2 | B2] whose first m/m1 rows are the relay's own task.
struct ClusterCode {
    int u = 0;
    Matrix S2; ///< (V_u*d) x n2, d rows per user
    Matrix F2; ///< n2 x (K*m)
    Matrix B2; ///< n2 x key_count

    std::size_t block_rows = 0; ///< d: rows each user sends

    /// Sampling block of user v.
    Matrix user_block(int v) const {
        return S2.row_slice(v * block_rows, (v + 1) * block_rows);
    }
};

struct Scheme {
    FieldCtx field;
    std::uint64_t seed = 0;
    Assignment assignment;
    DerivedParams params;
    RateReport rate;
    RelayCode relay;
    std::vector<ClusterCode> clusters;
};

struct BuildOptions {
    int max_attempts = 32;      ///< resampling budget per randomized step
    long long sweep_cap = 10000; ///< exhaustive collusion/survivor sweep bound
    int sweep_samples = 1000;    ///< random scenarios when over the bound
};

/// The m fixed aggregation rows: row j selects every dataset's piece j.
Matrix build_aggregation_matrix(const FieldCtx& f, const DerivedParams& p);

/// Solves the virtual-demand rows column by column so that each relay's
/// sampled rows vanish on every dataset its cluster does not hold. Free
/// entries are pinned to zero, so the result is canonical given S1.
/// Throws Inconsistent when S1 makes some column unsolvable and
/// InfeasibleColumn when a column is over-constrained (unreachable for
/// feasible parameters).
Matrix solve_relay_demand(const Assignment& a, const DerivedParams& p, const Matrix& S1);

/// Deterministic assembly from an already-sampled S1 and key mixer G
/// (rows of G independently mix the null directions into key_count keys).
RelayCode assemble_relay_code(const Assignment& a, const DerivedParams& p, const Matrix& S1,
                              const Matrix& G);

RelayCode build_relay_layer(const FieldCtx& f, const Assignment& a, const DerivedParams& p,
                            long long key_count, Rng& rng, const BuildOptions& opt = {});

/// Same column-by-column treatment one level down: user blocks of S2 must
/// vanish on datasets the user does not hold. extra_keys supplies the
/// uniform key rows appended below the relay's own B1 task rows.
ClusterCode assemble_cluster_code(const Assignment& a, const DerivedParams& p, int u,
                                  const RelayCode& relay, const Matrix& S2,
                                  const Matrix& extra_keys);

ClusterCode build_cluster_layer(const Assignment& a, const DerivedParams& p, int u,
                                const RelayCode& relay, long long key_count, Rng& rng,
                                const BuildOptions& opt = {});

/// Full pipeline: derive, feasibility, rates, both layers, then the
/// decodability and security rank sweeps at the declared budgets. Retries
/// with fresh randomness and throws SecurityConstraintViolated when a sweep
/// still fails after the attempt budget.
Scheme build_scheme(std::uint64_t q, const Assignment& a, const std::vector<int>& s2,
                    const std::vector<int>& T, std::uint64_t seed, const BuildOptions& opt = {});

/// Coefficients of user (u,v)'s key share: their S2 block applied to B2.
Matrix user_key_coefficients(const Scheme& s, int u, int v);

/// Every size-(V_u - s2_u) survivor stack of S2 must be invertible; checks
/// exhaustively up to opt.sweep_cap subsets, sampling beyond.
bool cluster_survivor_stacks_invertible(const ClusterCode& cc, const DerivedParams& p,
                                        const BuildOptions& opt, Rng& rng);

} // namespace hsa
