#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hsa/builder.hpp"
#include "hsa/enumerate.hpp"
#include "hsa/fixtures.hpp"
#include "hsa/runtime.hpp"
#include "hsa/serialize.hpp"

namespace {

using namespace hsa;

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitSecurity = 4;
constexpr int kExitDecode = 5;
constexpr int kExitFixture = 6;

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::ConstructionFailed:
        case Errc::AttemptsExhausted:
        case Errc::Singular:
        case Errc::Inconsistent:
        case Errc::InfeasibleColumn:
        case Errc::NoInvertibleSubset:
        case Errc::EncodabilityViolation:
        case Errc::MissingRelayMessage:
            return kExitConstruction;
        case Errc::SecurityConstraintViolated:
            return kExitSecurity;
        case Errc::DecodeMismatch:
            return kExitDecode;
        default:
            return kExitPrecondition;
    }
}

struct CommonOpts {
    std::string config_path;
    std::string format = "text";
    std::optional<std::uint64_t> q;
    std::optional<std::uint64_t> seed;
    std::optional<long> lprime;
    std::optional<long long> sweep_cap;
    std::optional<int> sweep_samples;
};

ScenarioConfig load_config(const CommonOpts& o) {
    ScenarioConfig cfg = parse_config(read_text_file(o.config_path));
    if (o.q) cfg.q = *o.q;
    if (o.seed) cfg.seed = *o.seed;
    if (o.lprime) cfg.lprime = *o.lprime;
    if (o.sweep_cap) cfg.sweep_cap = *o.sweep_cap;
    if (o.sweep_samples) cfg.sweep_samples = *o.sweep_samples;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_config = true) {
    if (with_config)
        cmd->add_option("config", o.config_path, "scenario config file")
            ->required()
            ->check(CLI::ExistingFile);
    cmd->add_option("--q", o.q, "field modulus override")->envname("HSA_Q");
    cmd->add_option("--seed", o.seed, "seed override")->envname("HSA_SEED");
    cmd->add_option("--lprime", o.lprime, "symbols per gradient piece")->envname("HSA_LPRIME");
    cmd->add_option("--exhaustive-caps", o.sweep_cap,
                    "max scenarios per exhaustive sweep before sampling")
        ->envname("HSA_EXHAUSTIVE_CAPS");
    cmd->add_option("--sample-count", o.sweep_samples, "sampled scenarios beyond the cap")
        ->envname("HSA_SAMPLE_COUNT");
    cmd->add_option("--format", o.format, "text or structured")
        ->check(CLI::IsMember({"text", "structured"}))
        ->envname("HSA_FORMAT");
}

Scheme build_from_config(const ScenarioConfig& cfg) {
    BuildOptions opt;
    opt.sweep_cap = cfg.sweep_cap;
    opt.sweep_samples = cfg.sweep_samples;
    return build_scheme(cfg.q, cfg.assignment, cfg.s2, cfg.T, cfg.seed, opt);
}

AuditOptions audit_options(const ScenarioConfig& cfg, bool oracle, const std::string& mode) {
    AuditOptions opt;
    opt.sweep_cap = cfg.sweep_cap;
    opt.sweep_samples = cfg.sweep_samples;
    opt.lprime = cfg.lprime;
    opt.with_oracle = oracle;
    opt.mode = mode == "partialsums" ? ColluderInputMode::PartialSums
                                     : ColluderInputMode::HeldPieces;
    return opt;
}

int emit_audit(const AuditReport& rep, const std::string& format) {
    std::cout << (format == "structured" ? report_json(rep) : report_text(rep));
    if (rep.ok()) return kExitOk;
    const CheckResult* f = rep.first_failure();
    std::cerr << "first failure: " << f->check << " " << f->scenario << " measured=" << f->measured
              << " expected=" << f->expected << "\n";
    return kExitSecurity;
}

int cmd_rates(const CommonOpts& o) {
    ScenarioConfig cfg = load_config(o);
    DerivedParams p = derive_params(cfg.assignment, cfg.s2, cfg.T);
    check_feasibility(p);
    RateReport r = rates(p);
    std::cout << (o.format == "structured" ? rates_json(p, r) : rates_text(p, r));
    return kExitOk;
}

int cmd_build(const CommonOpts& o, const std::string& out_path, bool oracle,
              const std::string& mode) {
    ScenarioConfig cfg = load_config(o);
    Scheme s = build_from_config(cfg);
    AuditReport rep = audit_full(s, audit_options(cfg, oracle, mode));
    write_text_file(out_path, scheme_text(s));
    std::cout << "scheme written to " << out_path << "\n";
    return emit_audit(rep, o.format);
}

int cmd_run(const CommonOpts& o, const std::string& scheme_path, bool all_dropouts) {
    ScenarioConfig cfg = load_config(o);
    Scheme s = scheme_path.empty() ? build_from_config(cfg)
                                   : parse_scheme(read_text_file(scheme_path));
    Rng rng(mix_seed(cfg.seed ^ 0x5eedba5eull));

    auto one_round = [&](const std::vector<std::vector<int>>& drops,
                         bool print_transcript) -> long long {
        auto [w, n] = sample_inputs(s, cfg.lprime, rng);
        Transcript t = simulate(s, w, n, drops);
        if (print_transcript) std::cout << transcript_text(s, t);
        Matrix want = direct_sum(s, w);
        long long bad = 0;
        for (std::size_t i = 0; i < want.rows(); ++i)
            for (std::size_t j = 0; j < want.cols(); ++j)
                if (t.decoded(i, j) != want(i, j)) ++bad;
        return bad;
    };

    if (all_dropouts) {
        std::vector<std::vector<std::vector<int>>> choices(s.params.U);
        for (int u = 0; u < s.params.U; ++u)
            choices[u] = subsets_up_to_size(s.params.V[u], s.params.s2[u]);
        long long patterns = 0, failures = 0;
        Rng sweep_rng(mix_seed(cfg.seed ^ 0xd20b0ull));
        for_each_tuple(choices, cfg.sweep_cap, cfg.sweep_samples, sweep_rng,
                       [&](const std::vector<std::vector<int>>& drops) {
                           ++patterns;
                           if (one_round(drops, false) != 0) ++failures;
                       });
        std::cout << "dropout patterns checked: " << patterns << ", failures: " << failures
                  << "\n";
        if (failures) {
            std::cerr << "decode mismatch under dropout sweep\n";
            return kExitDecode;
        }
        std::cout << "decode OK\n";
        return kExitOk;
    }

    std::vector<std::vector<int>> drops =
        cfg.dropouts.empty() ? std::vector<std::vector<int>>(s.params.U) : cfg.dropouts;
    long long bad = one_round(drops, true);
    if (bad) {
        std::cerr << "decode MISMATCH in " << bad << " entries\n";
        return kExitDecode;
    }
    std::cout << "decode OK\n";
    return kExitOk;
}

int cmd_audit(const CommonOpts& o, const std::string& scheme_path, bool oracle,
              const std::string& mode) {
    ScenarioConfig cfg;
    cfg.sweep_cap = o.sweep_cap.value_or(cfg.sweep_cap);
    cfg.sweep_samples = o.sweep_samples.value_or(cfg.sweep_samples);
    cfg.lprime = o.lprime.value_or(cfg.lprime);
    Scheme s = parse_scheme(read_text_file(scheme_path));
    AuditReport rep = audit_full(s, audit_options(cfg, oracle, mode));
    return emit_audit(rep, o.format);
}

int cmd_fixture_verify(std::uint64_t q, const std::string& format) {
    AuditReport rep;
    try {
        rep = verify_fixture(q);
    } catch (const Error& e) {
        rep.lines.push_back({"fixture_embed", errc_name(e.code()), 1, 0, false});
        std::cout << (format == "structured" ? report_json(rep) : report_text(rep));
        std::cerr << "fixture error: " << e.what() << "\n";
        return kExitFixture;
    }
    std::cout << (format == "structured" ? report_json(rep) : report_text(rep));
    if (rep.ok()) return kExitOk;
    for (const CheckResult& l : rep.lines)
        if (!l.pass)
            std::cerr << "fixture failure: " << l.check << " " << l.scenario
                      << " measured=" << l.measured << " expected=" << l.expected << "\n";
    return kExitFixture;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical secure aggregation: rates, construction, simulation, audits"};
    app.require_subcommand(1);

    CommonOpts rates_o, build_o, run_o, audit_o;
    std::string out_path = "scheme.txt";
    std::string run_scheme, audit_scheme;
    bool build_oracle = false, audit_oracle = false, all_dropouts = false;
    std::string build_mode = "heldpieces", audit_mode = "heldpieces";
    std::uint64_t fixture_q = 101;
    std::string fixture_format = "text";

    CLI::App* c_rates = app.add_subcommand("rates", "print the exact rate point for a config");
    add_common(c_rates, rates_o);

    CLI::App* c_build = app.add_subcommand("build", "build a scheme, audit it, write the dump");
    add_common(c_build, build_o);
    c_build->add_option("--out", out_path, "scheme dump path")->envname("HSA_OUT");
    c_build->add_flag("--oracle", build_oracle, "add counting-oracle cross-checks");
    c_build->add_option("--mode", build_mode, "colluder input model")
        ->check(CLI::IsMember({"heldpieces", "partialsums"}));

    CLI::App* c_run = app.add_subcommand("run", "simulate one aggregation round");
    add_common(c_run, run_o);
    c_run->add_option("--scheme", run_scheme, "use a prebuilt scheme dump")
        ->check(CLI::ExistingFile);
    c_run->add_flag("--all-dropouts", all_dropouts, "sweep every admissible dropout pattern");

    CLI::App* c_audit = app.add_subcommand("audit", "audit a scheme dump");
    c_audit->add_option("scheme", audit_scheme, "scheme dump path")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(c_audit, audit_o, false);
    c_audit->add_flag("--oracle", audit_oracle, "add counting-oracle cross-checks");
    c_audit->add_option("--mode", audit_mode, "colluder input model")
        ->check(CLI::IsMember({"heldpieces", "partialsums"}));

    CLI::App* c_fixture = app.add_subcommand("fixture-verify", "re-check the embedded fixtures");
    c_fixture->add_option("--q", fixture_q, "field modulus")->envname("HSA_Q");
    c_fixture->add_option("--format", fixture_format, "text or structured")
        ->check(CLI::IsMember({"text", "structured"}))
        ->envname("HSA_FORMAT");

    try {
        app.parse(argc, argv);
        if (c_rates->parsed()) return cmd_rates(rates_o);
        if (c_build->parsed()) return cmd_build(build_o, out_path, build_oracle, build_mode);
        if (c_run->parsed()) return cmd_run(run_o, run_scheme, all_dropouts);
        if (c_audit->parsed()) return cmd_audit(audit_o, audit_scheme, audit_oracle, audit_mode);
        if (c_fixture->parsed()) return cmd_fixture_verify(fixture_q, fixture_format);
        return kExitPrecondition;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
}
