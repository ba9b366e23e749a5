#include "hsa/builder.hpp"

#include <string>

#include "hsa/audit.hpp"
#include "hsa/enumerate.hpp"

namespace hsa {

namespace {

Matrix negated(const Matrix& m) { return m.scaled(m.field().neg(1)); }

} // namespace

Matrix build_aggregation_matrix(const FieldCtx& f, const DerivedParams& p) {
    Matrix A(f, p.m, p.gradient_dim());
    for (int j = 0; j < p.m; ++j)
        for (int k = 0; k < p.K; ++k) A(j, p.col(k, j)) = 1;
    return A;
}

Matrix solve_relay_demand(const Assignment& a, const DerivedParams& p, const Matrix& S1) {
    const FieldCtx& f = S1.field();
    const std::size_t n1 = p.relay_rows();
    const std::size_t task = p.relay_task_rows();
    const std::size_t m = static_cast<std::size_t>(p.m);
    const std::size_t nv = n1 - m;
    if (S1.rows() != n1 || S1.cols() != n1)
        raise(Errc::DimensionMismatch, "S1 must be " + std::to_string(n1) + " square");

    Matrix A = build_aggregation_matrix(f, p);
    Matrix F(f, n1, p.gradient_dim());
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < F.cols(); ++c) F(r, c) = A(r, c);

    for (int k = 0; k < p.K; ++k) {
        std::vector<Matrix> task_blocks, virt_blocks;
        for (int u = 0; u < p.U; ++u) {
            if (a.cluster_holds(u, k)) continue;
            Matrix rows = S1.row_slice(u * task, (u + 1) * task);
            task_blocks.push_back(rows.col_slice(0, m));
            virt_blocks.push_back(rows.col_slice(m, n1));
        }
        if (task_blocks.empty()) continue; // replicated everywhere: all entries free, kept zero
        Matrix lhs = vstack(virt_blocks);
        if (lhs.rows() > nv)
            raise(Errc::InfeasibleColumn, "dataset " + std::to_string(k + 1) +
                                              " is excluded from more clusters than the "
                                              "virtual rows can absorb");
        Matrix task_stack = vstack(task_blocks);
        for (int j = 0; j < p.m; ++j) {
            Matrix rhs = negated(task_stack.mul(A.column(p.col(k, j))));
            Matrix x = lhs.solve_particular(rhs); // Inconsistent propagates to the caller
            for (std::size_t r = 0; r < nv; ++r) F(m + r, p.col(k, j)) = x(r, 0);
        }
    }
    return F;
}

RelayCode assemble_relay_code(const Assignment& a, const DerivedParams& p, const Matrix& S1,
                              const Matrix& G) {
    const std::size_t m = static_cast<std::size_t>(p.m);
    Matrix F = solve_relay_demand(a, p, S1);
    Matrix F1 = S1.mul(F);
    Matrix sinv_top = S1.inverse().row_slice(0, m);
    Matrix Q = sinv_top.null_space_basis();
    if (G.rows() != Q.cols())
        raise(Errc::DimensionMismatch, "key mixer must have one row per null direction");
    Matrix B1 = Q.mul(G);
    return RelayCode{S1, std::move(F), std::move(F1), std::move(B1), std::move(sinv_top),
                     std::move(Q)};
}

namespace {

void verify_relay_code(const Assignment& a, const DerivedParams& p, const RelayCode& rc) {
    const std::size_t task = p.relay_task_rows();
    // Sampled rows of excluded datasets must vanish.
    for (int u = 0; u < p.U; ++u)
        for (int k = 0; k < p.K; ++k) {
            if (a.cluster_holds(u, k)) continue;
            for (int j = 0; j < p.m; ++j)
                for (std::size_t r = u * task; r < (u + 1) * task; ++r)
                    if (rc.F1(r, p.col(k, j)) != 0)
                        raise(Errc::ConstructionFailed, "relay row leaks an excluded dataset");
        }
    if (!(rc.sinv_top.mul(rc.F1) == build_aggregation_matrix(rc.S1.field(), p)))
        raise(Errc::ConstructionFailed, "decoder rows do not reduce tasks to the aggregate");
    if (!rc.sinv_top.mul(rc.B1).is_zero())
        raise(Errc::ConstructionFailed, "keys survive the decoder");
    if (rc.B1.rank() != rc.F.rows() - static_cast<std::size_t>(p.m))
        raise(Errc::ConstructionFailed, "key block rank deficit");
}

} // namespace

RelayCode build_relay_layer(const FieldCtx& f, const Assignment& a, const DerivedParams& p,
                            long long key_count, Rng& rng, const BuildOptions& opt) {
    const std::size_t n1 = p.relay_rows();
    const std::size_t nv = n1 - static_cast<std::size_t>(p.m);
    if (static_cast<std::size_t>(key_count) < nv)
        raise(Errc::ConstructionFailed, "key budget below the null-space dimension");
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        Matrix S1 = Matrix::random_full_rank(f, n1, n1, rng, opt.max_attempts);
        Matrix G = Matrix::random_full_rank(f, nv, static_cast<std::size_t>(key_count), rng,
                                            opt.max_attempts);
        try {
            RelayCode rc = assemble_relay_code(a, p, S1, G);
            verify_relay_code(a, p, rc);
            return rc;
        } catch (const Error& e) {
            if (e.code() != Errc::Inconsistent) throw; // only unlucky sampling is retryable
        }
    }
    raise(Errc::ConstructionFailed,
          "no usable inter-cluster sample in " + std::to_string(opt.max_attempts) + " attempts");
}

ClusterCode assemble_cluster_code(const Assignment& a, const DerivedParams& p, int u,
                                  const RelayCode& relay, const Matrix& S2,
                                  const Matrix& extra_keys) {
    const FieldCtx& f = S2.field();
    const std::size_t d = p.user_rows(u);
    const std::size_t n2 = p.cluster_code_rows(u);
    const std::size_t task = p.relay_task_rows();
    const std::size_t nv2 = n2 - task;
    const int Vu = p.V.at(u);
    if (S2.rows() != Vu * d || S2.cols() != n2)
        raise(Errc::DimensionMismatch, "S2 must be " + std::to_string(Vu * d) + "x" +
                                           std::to_string(n2) + " for cluster " + std::to_string(u + 1));
    if (extra_keys.rows() != nv2)
        raise(Errc::DimensionMismatch, "extra key rows must fill the virtual block");

    Matrix F2(f, n2, p.gradient_dim());
    for (std::size_t r = 0; r < task; ++r)
        for (std::size_t c = 0; c < F2.cols(); ++c) F2(r, c) = relay.F1(u * task + r, c);

    for (int k = 0; k < p.K; ++k) {
        std::vector<Matrix> task_blocks, virt_blocks;
        for (int v = 0; v < Vu; ++v) {
            if (a.user_holds(u, v, k)) continue;
            Matrix rows = S2.row_slice(v * d, (v + 1) * d);
            task_blocks.push_back(rows.col_slice(0, task));
            virt_blocks.push_back(rows.col_slice(task, n2));
        }
        if (task_blocks.empty()) continue;
        if (a.cluster_holds(u, k) && task_blocks.size() * d > nv2)
            raise(Errc::InfeasibleColumn, "dataset " + std::to_string(k + 1) +
                                              " is missing from more users than cluster " +
                                              std::to_string(u + 1) + " can absorb");
        Matrix lhs = vstack(virt_blocks);
        Matrix task_stack = vstack(task_blocks);
        for (int j = 0; j < p.m; ++j) {
            std::size_t c = p.col(k, j);
            Matrix t(f, task, 1);
            for (std::size_t r = 0; r < task; ++r) t(r, 0) = F2(r, c);
            Matrix rhs = negated(task_stack.mul(t));
            Matrix x = lhs.solve_particular(rhs);
            for (std::size_t r = 0; r < nv2; ++r) F2(task + r, c) = x(r, 0);
        }
    }

    Matrix B2 = vstack({relay.B1.row_slice(u * task, (u + 1) * task), extra_keys});
    return ClusterCode{u, S2, std::move(F2), std::move(B2), d};
}

bool cluster_survivor_stacks_invertible(const ClusterCode& cc, const DerivedParams& p,
                                        const BuildOptions& opt, Rng& rng) {
    const int Vu = p.V.at(cc.u);
    const int take = Vu - p.s2.at(cc.u);
    const std::size_t n2 = p.cluster_code_rows(cc.u);
    auto stack_invertible = [&](const std::vector<int>& users) {
        std::vector<Matrix> blocks;
        blocks.reserve(users.size());
        for (int v : users) blocks.push_back(cc.user_block(v));
        return vstack(blocks).rank() == n2;
    };
    if (count_subsets(Vu, take, opt.sweep_cap) <= opt.sweep_cap) {
        for (const auto& users : subsets_of_size(Vu, take))
            if (!stack_invertible(users)) return false;
        return true;
    }
    for (int i = 0; i < opt.sweep_samples; ++i)
        if (!stack_invertible(sample_subset(Vu, take, rng))) return false;
    return true;
}

namespace {

void verify_cluster_code(const Assignment& a, const DerivedParams& p, const ClusterCode& cc) {
    for (int v = 0; v < p.V.at(cc.u); ++v) {
        Matrix coeff = cc.user_block(v).mul(cc.F2);
        for (int k = 0; k < p.K; ++k) {
            if (a.user_holds(cc.u, v, k)) continue;
            for (int j = 0; j < p.m; ++j)
                for (std::size_t r = 0; r < coeff.rows(); ++r)
                    if (coeff(r, p.col(k, j)) != 0)
                        raise(Errc::ConstructionFailed, "user share leaks an unheld dataset");
        }
    }
}

} // namespace

ClusterCode build_cluster_layer(const Assignment& a, const DerivedParams& p, int u,
                                const RelayCode& relay, long long key_count, Rng& rng,
                                const BuildOptions& opt) {
    const FieldCtx& f = relay.S1.field();
    const std::size_t d = p.user_rows(u);
    const std::size_t n2 = p.cluster_code_rows(u);
    const std::size_t nv2 = n2 - p.relay_task_rows();
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        Matrix S2 = Matrix::uniform_random(f, p.V.at(u) * d, n2, rng);
        Matrix extra = Matrix::uniform_random(f, nv2, static_cast<std::size_t>(key_count), rng);
        try {
            ClusterCode cc = assemble_cluster_code(a, p, u, relay, S2, extra);
            if (!cluster_survivor_stacks_invertible(cc, p, opt, rng)) continue;
            verify_cluster_code(a, p, cc);
            return cc;
        } catch (const Error& e) {
            if (e.code() != Errc::Inconsistent) throw;
        }
    }
    raise(Errc::ConstructionFailed, "no usable intra-cluster sample for cluster " +
                                        std::to_string(u + 1) + " in " +
                                        std::to_string(opt.max_attempts) + " attempts");
}

Scheme build_scheme(std::uint64_t q, const Assignment& a, const std::vector<int>& s2,
                    const std::vector<int>& T, std::uint64_t seed, const BuildOptions& opt) {
    FieldCtx f(q);
    DerivedParams p = derive_params(a, s2, T);
    check_feasibility(p);
    RateReport rate = rates(p);

    Rng rng(seed);
    // Sweep randomness is kept off the construction stream so the built
    // matrices depend only on (assignment, s2, T, q, seed).
    Rng sweep_rng(mix_seed(seed));

    std::string last_failure;
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        Scheme s{f, seed, a, p, rate, build_relay_layer(f, a, p, rate.key_count, rng, opt), {}};
        bool cluster_failed = false;
        for (int u = 0; u < p.U; ++u) {
            try {
                s.clusters.push_back(build_cluster_layer(a, p, u, s.relay, rate.key_count, rng, opt));
            } catch (const Error& e) {
                if (e.code() != Errc::ConstructionFailed) throw;
                last_failure = e.what();
                cluster_failed = true;
                break;
            }
        }
        if (cluster_failed) continue;
        if (auto failure = sweep_security_constraints(s, opt, sweep_rng)) {
            last_failure = failure->check + " failed for " + failure->scenario;
            continue;
        }
        return s;
    }
    raise(Errc::SecurityConstraintViolated,
          "construction kept failing its security sweep: " + last_failure);
}

Matrix user_key_coefficients(const Scheme& s, int u, int v) {
    if (u < 0 || u >= s.params.U || v < 0 || v >= s.params.V.at(u))
        raise(Errc::IndexOutOfRange, "no user (" + std::to_string(u + 1) + "," +
                                         std::to_string(v + 1) + ")");
    const ClusterCode& cc = s.clusters.at(u);
    return cc.user_block(v).mul(cc.B2);
}

} // namespace hsa
