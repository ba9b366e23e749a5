#pragma once

#include <map>
#include <vector>

#include "hsa/builder.hpp"

namespace hsa {

/// Gradient pieces, one row per (dataset, piece) coordinate in the order
/// DerivedParams::col, L' symbols per row.
struct GradientSet {
    Matrix W;
    Matrix piece(const DerivedParams& p, int k, int j) const {
        return W.row_slice(p.col(k, j), p.col(k, j) + 1);
    }
};

/// Source keys, key_count rows of L' symbols.
struct KeyMaterial {
    Matrix N;
};

struct Transcript {
    std::vector<std::vector<Matrix>> X; ///< X[u][v]: what user v of cluster u sends
    std::vector<std::vector<int>> survivors; ///< per cluster, sorted
    std::vector<std::vector<int>> used;      ///< survivor subset each relay inverted
    std::vector<Matrix> Y;                   ///< per relay, m/m1 rows
    Matrix decoded;                          ///< m rows: pieces of the aggregate

    /// Symbols user (u,v) uploads; R2[u] * m * lprime when it sends.
    std::size_t user_symbols(int u, int v) const { return X.at(u).at(v).rows() * X.at(u).at(v).cols(); }
    /// Symbols relay u uploads; R1 * m * lprime.
    std::size_t relay_symbols(int u) const { return Y.at(u).rows() * Y.at(u).cols(); }
};

/// Draws W then N from disjoint segments of the stream.
std::pair<GradientSet, KeyMaterial> sample_inputs(const Scheme& s, long lprime, Rng& rng);

/// Coefficient rows of user (u,v)'s message over the stacked [W; N] vector.
Matrix user_message_coeff(const Scheme& s, int u, int v);

/// X_{u,v}. Re-checks that the coefficients vanish on every dataset the user
/// does not hold and throws EncodabilityViolation otherwise.
Matrix compute_user_message(const Scheme& s, int u, int v, const GradientSet& w,
                            const KeyMaterial& n);

/// Inverts the lexicographically smallest invertible survivor stack of size
/// exactly V_u - s2_u and returns the relay's m/m1 task rows.
/// Throws TooFewSurvivors / MissingRelayMessage / NoInvertibleSubset.
Matrix relay_aggregate(const Scheme& s, int u, const std::map<int, Matrix>& received,
                       const std::vector<int>& survivors, std::vector<int>* used = nullptr);

/// Applies the decoder rows to the stacked relay responses; keys cancel and
/// the m aggregate pieces come out.
Matrix server_decode(const Scheme& s, const std::vector<Matrix>& Y);

/// Σ_k W_k computed directly from the inputs; decode cross-check oracle.
Matrix direct_sum(const Scheme& s, const GradientSet& w);

/// One full round with the given per-cluster dropout sets (users that send
/// nothing). Every user's message is still recorded in the transcript.
Transcript simulate(const Scheme& s, const GradientSet& w, const KeyMaterial& n,
                    const std::vector<std::vector<int>>& dropouts);

} // namespace hsa
