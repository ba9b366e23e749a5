#include "hsa/runtime.hpp"

#include <algorithm>
#include <string>

#include "hsa/enumerate.hpp"

namespace hsa {

std::pair<GradientSet, KeyMaterial> sample_inputs(const Scheme& s, long lprime, Rng& rng) {
    if (lprime < 1) raise(Errc::IndexOutOfRange, "lprime must be positive");
    GradientSet w{Matrix::uniform_random(s.field, s.params.gradient_dim(), lprime, rng)};
    KeyMaterial n{Matrix::uniform_random(s.field, s.rate.key_count, lprime, rng)};
    return {std::move(w), std::move(n)};
}

Matrix user_message_coeff(const Scheme& s, int u, int v) {
    if (u < 0 || u >= s.params.U || v < 0 || v >= s.params.V.at(u))
        raise(Errc::IndexOutOfRange, "no user (" + std::to_string(u + 1) + "," +
                                         std::to_string(v + 1) + ")");
    const ClusterCode& cc = s.clusters.at(u);
    return cc.user_block(v).mul(hstack({cc.F2, cc.B2}));
}

Matrix compute_user_message(const Scheme& s, int u, int v, const GradientSet& w,
                            const KeyMaterial& n) {
    Matrix coeff = user_message_coeff(s, u, v);
    const DerivedParams& p = s.params;
    for (int k = 0; k < p.K; ++k) {
        if (s.assignment.user_holds(u, v, k)) continue;
        for (int j = 0; j < p.m; ++j)
            for (std::size_t r = 0; r < coeff.rows(); ++r)
                if (coeff(r, p.col(k, j)) != 0)
                    raise(Errc::EncodabilityViolation,
                          "user (" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
                              ") would touch dataset " + std::to_string(k + 1));
    }
    return coeff.mul(vstack({w.W, n.N}));
}

Matrix relay_aggregate(const Scheme& s, int u, const std::map<int, Matrix>& received,
                       const std::vector<int>& survivors, std::vector<int>* used) {
    const DerivedParams& p = s.params;
    const ClusterCode& cc = s.clusters.at(u);
    const int need = p.V.at(u) - p.s2.at(u);
    if (static_cast<int>(survivors.size()) < need)
        raise(Errc::TooFewSurvivors, "cluster " + std::to_string(u + 1) + ": " +
                                         std::to_string(survivors.size()) + " survivors, need " +
                                         std::to_string(need));
    for (int v : survivors)
        if (!received.count(v))
            raise(Errc::MissingRelayMessage, "survivor " + std::to_string(v + 1) +
                                                 " of cluster " + std::to_string(u + 1) +
                                                 " sent nothing");

    const std::size_t n2 = p.cluster_code_rows(u);
    for (const auto& pick : subsets_of_size(static_cast<int>(survivors.size()), need)) {
        std::vector<int> users;
        users.reserve(need);
        for (int idx : pick) users.push_back(survivors[idx]);
        std::vector<Matrix> sample_blocks, message_blocks;
        for (int v : users) {
            sample_blocks.push_back(cc.user_block(v));
            message_blocks.push_back(received.at(v));
        }
        Matrix stack = vstack(sample_blocks);
        if (stack.rank() != n2) continue;
        Matrix tasks = stack.inverse().mul(vstack(message_blocks));
        if (used) *used = users;
        return tasks.row_slice(0, p.relay_task_rows());
    }
    raise(Errc::NoInvertibleSubset,
          "no invertible survivor stack in cluster " + std::to_string(u + 1));
}

Matrix server_decode(const Scheme& s, const std::vector<Matrix>& Y) {
    if (static_cast<int>(Y.size()) != s.params.U)
        raise(Errc::DimensionMismatch, "expected one response per relay");
    return s.relay.sinv_top.mul(vstack(Y));
}

Matrix direct_sum(const Scheme& s, const GradientSet& w) {
    const DerivedParams& p = s.params;
    Matrix out(s.field, p.m, w.W.cols());
    for (int j = 0; j < p.m; ++j)
        for (int k = 0; k < p.K; ++k)
            for (std::size_t c = 0; c < w.W.cols(); ++c)
                out(j, c) = s.field.add(out(j, c), w.W(p.col(k, j), c));
    return out;
}

Transcript simulate(const Scheme& s, const GradientSet& w, const KeyMaterial& n,
                    const std::vector<std::vector<int>>& dropouts) {
    const DerivedParams& p = s.params;
    if (static_cast<int>(dropouts.size()) != p.U)
        raise(Errc::DimensionMismatch, "expected one dropout set per cluster");
    for (int u = 0; u < p.U; ++u) {
        if (static_cast<int>(dropouts[u].size()) > p.s2[u])
            raise(Errc::TooFewSurvivors, "cluster " + std::to_string(u + 1) + " drops " +
                                             std::to_string(dropouts[u].size()) +
                                             " users but tolerates " + std::to_string(p.s2[u]));
        for (int v : dropouts[u])
            if (v < 0 || v >= p.V[u])
                raise(Errc::IndexOutOfRange, "dropout names unknown user " + std::to_string(v + 1));
    }

    std::vector<std::vector<Matrix>> X(p.U);
    std::vector<std::vector<int>> survivors(p.U), used(p.U);
    std::vector<Matrix> Y;
    for (int u = 0; u < p.U; ++u) {
        std::map<int, Matrix> received;
        for (int v = 0; v < p.V[u]; ++v) {
            X[u].push_back(compute_user_message(s, u, v, w, n));
            bool dropped = std::find(dropouts[u].begin(), dropouts[u].end(), v) != dropouts[u].end();
            if (!dropped) {
                survivors[u].push_back(v);
                received.emplace(v, X[u].back());
            }
        }
        Y.push_back(relay_aggregate(s, u, received, survivors[u], &used[u]));
    }
    Matrix decoded = server_decode(s, Y);
    return Transcript{std::move(X), std::move(survivors), std::move(used), std::move(Y),
                      std::move(decoded)};
}

} // namespace hsa
