// occlab command-line front end. One JSON document on stdout per run,
// diagnostics on stderr. Exit codes: 0 ok, 1 usage/input, 2 negative
// verdict, 3 infeasible, 4 cap exceeded, 5 numeric failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "occlab/absorption.hpp"
#include "occlab/errors.hpp"
#include "occlab/geometry.hpp"
#include "occlab/io.hpp"
#include "occlab/mixtures.hpp"
#include "occlab/occupancy.hpp"
#include "occlab/simulate.hpp"

using namespace occlab;

namespace {

enum Exit { ok = 0, usage = 1, negative = 2, infeasible = 3, cap = 4, numeric = 5 };

struct Config {
    std::string model_path;
    std::string mode_flag;
    bool pretty = false;
    std::string tol_stochastic, tol_character, tol_support;
    double tol_fixpoint = 1e-12;
    double rank_cutoff = 1e-8;
    std::size_t vertex_cap = 100'000;
    std::size_t policy_cap = 10'000;
    std::size_t max_sweeps = 1'000'000;

    // subcommand inputs
    std::string policy_path, measure_path, kernel_path, alpha_text;
    std::vector<std::string> probes;
    bool alpha_constrained = false;
    bool with_vertices = false;
    bool brute_force = false;
    std::size_t max_order = 0;
    std::size_t episodes = 100'000;
    std::uint64_t seed = 0;
    std::size_t step_cap = 1'000'000;
    std::size_t jobs = 1;
    bool compare_analytic = false;
    std::size_t tail_horizon = 0;
};

std::optional<Mode> resolve_mode(const Config& cfg)
{
    if (!cfg.mode_flag.empty())
        return parse_mode(cfg.mode_flag);
    if (const char* env = std::getenv("OCCLAB_MODE"); env && *env)
        return parse_mode(env);
    return std::nullopt;
}

template <Scalar T>
Tolerances<T> resolve_tolerances(const Config& cfg)
{
    auto tol = Tolerances<T>::defaults();
    if (!cfg.tol_stochastic.empty())
        tol.stochastic = scalar_from_rational<T>(parse_rational(cfg.tol_stochastic));
    if (!cfg.tol_character.empty())
        tol.character = scalar_from_rational<T>(parse_rational(cfg.tol_character));
    if (!cfg.tol_support.empty())
        tol.support = scalar_from_rational<T>(parse_rational(cfg.tol_support));
    tol.fixpoint = cfg.tol_fixpoint;
    tol.rank_cutoff = cfg.rank_cutoff;
    return tol;
}

template <Scalar T>
Json config_json(const std::string& command, const Config& cfg, const Tolerances<T>& tol)
{
    Json c;
    c["command"] = command;
    if (!cfg.model_path.empty())
        c["model"] = cfg.model_path;
    c["mode"] = to_string(mode_of_v<T>);
    c["tolerances"] = tolerances_to_json(tol);
    c["vertex_cap"] = cfg.vertex_cap;
    c["policy_cap"] = cfg.policy_cap;
    c["max_sweeps"] = cfg.max_sweeps;
    if (command == "occupancy" || command == "simulate" || (command == "decompose" && !cfg.policy_path.empty()))
        c["policy"] = cfg.policy_path;
    if (command == "face" || (command == "decompose" && !cfg.measure_path.empty()))
        c["measure"] = cfg.measure_path;
    if (command == "face") {
        c["alpha_constrained"] = cfg.alpha_constrained;
        c["vertices"] = cfg.with_vertices;
        c["probes"] = cfg.probes;
    }
    if (!cfg.alpha_text.empty())
        c["alpha"] = cfg.alpha_text;
    if (command == "minimal-order") {
        c["brute_force"] = cfg.brute_force;
        c["max_order"] = cfg.max_order;
    }
    if (command == "lissage")
        c["kernel"] = cfg.kernel_path;
    if (command == "simulate") {
        c["episodes"] = cfg.episodes;
        c["seed"] = cfg.seed;
        c["step_cap"] = cfg.step_cap;
        c["jobs"] = cfg.jobs;
        c["compare_analytic"] = cfg.compare_analytic;
        c["tail_horizon"] = cfg.tail_horizon;
    }
    return c;
}

/// Occupancy measure of any supported policy class.
template <Scalar T>
OccupancyMeasure<T> occupancy_of(const Mdp<T>& model, const AnyPolicy<T>& policy, const Tolerances<T>& tol)
{
    return std::visit(
        [&](const auto& p) -> OccupancyMeasure<T> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::same_as<P, DeterministicPolicy>) {
                check_selector(model, p);
                return occupancy_of_deterministic(model, p);
            } else if constexpr (std::same_as<P, StationaryPolicy<T>>) {
                check_policy(model, p, tol.stochastic);
                return occupancy_of_stationary(model, p);
            } else if constexpr (std::same_as<P, ChatteringKernel<T>>) {
                check_kernel(model, p, tol.stochastic);
                return occupancy_of_chattering(model, p);
            } else {
                check_mixture(model, p, tol.stochastic);
                return occupancy_of_mixture(model, p);
            }
        },
        policy);
}

SimPolicy to_sim_policy(const AnyPolicy<Rational>& p)
{
    return std::visit(
        [](const auto& v) -> SimPolicy {
            using P = std::decay_t<decltype(v)>;
            if constexpr (std::same_as<P, DeterministicPolicy>)
                return v;
            else if constexpr (std::same_as<P, StationaryPolicy<Rational>>)
                return to_double_policy(v);
            else if constexpr (std::same_as<P, ChatteringKernel<Rational>>)
                return to_double_kernel(v);
            else
                return to_double_mixture(v);
        },
        p);
}

SimPolicy to_sim_policy(const AnyPolicy<double>& p)
{
    return std::visit([](const auto& v) -> SimPolicy { return v; }, p);
}

template <Scalar T>
Json vector_json(const std::vector<T>& v)
{
    Json out = Json::array();
    for (const auto& x : v)
        out.push_back(scalar_to_json(x));
    return out;
}

template <Scalar T>
std::vector<T> read_alpha(const Mdp<T>& model, const std::string& text)
{
    auto alpha = parse_vector<T>(text);
    if (alpha.size() != model.reward_dim())
        throw InvalidArgument("--alpha has " + std::to_string(alpha.size()) + " components, reward_dim is " +
                              std::to_string(model.reward_dim()));
    return alpha;
}

template <Scalar T>
Json occupancy_json(const Mdp<T>& model, const OccupancyMeasure<T>& mu)
{
    Json marginal = Json::object();
    auto ts = model.pairs().transient_states();
    for (std::size_t i = 0; i < ts.size(); ++i)
        marginal[model.state_name(ts[i])] = scalar_to_json(mu.marginal[i]);
    return Json{{"measure", measure_to_json<T>(model, mu.mass)},
                {"marginal", marginal},
                {"residual", scalar_to_json(mu.residual)},
                {"total", scalar_to_json(mu.total())},
                {"performance", vector_json(performance<T>(model, mu.mass))}};
}

template <Scalar T>
Json decomposition_json(const Mdp<T>& model, const PerformanceDecomposition<T>& dec)
{
    Json components = Json::array();
    for (const auto& perf : dec.component_performance)
        components.push_back(vector_json(perf));
    // Replay: the mixture's occupancy measure from scratch, then its performance.
    auto replay = occupancy_of_mixture(model, dec.mixture);
    auto replay_perf = performance<T>(model, replay.mass);
    T replay_error(0);
    for (std::size_t i = 0; i < replay_perf.size(); ++i)
        replay_error = std::max(replay_error, T(abs_value(T(replay_perf[i] - dec.alpha[i]))));
    Json verification{{"order", dec.mixture.order()},
                      {"order_bound", model.reward_dim() + 1},
                      {"achieved", vector_json(dec.achieved)},
                      {"error", scalar_to_json(dec.error)},
                      {"replay_performance", vector_json(replay_perf)},
                      {"replay_error", scalar_to_json(replay_error)},
                      {"replay_residual", scalar_to_json(replay.residual)},
                      {"source_residual", scalar_to_json(characteristic_residual<T>(model, dec.source_measure))}};
    return Json{{"alpha", vector_json(dec.alpha)},
                {"mixture", mixture_to_json(model, dec.mixture)},
                {"component_performance", components},
                {"source_measure", sparse_measure_to_json<T>(model, dec.source_measure)},
                {"verification", verification}};
}

struct Outcome {
    Json result;
    int code = Exit::ok;
    std::string summary;
};

template <Scalar T>
Outcome run_model_command(const std::string& command, const Config& cfg, const Mdp<T>& model,
                          const Tolerances<T>& tol)
{
    Outcome out;
    PolytopeOptions popt{cfg.vertex_cap};

    if (command == "validate") {
        auto report = validate(model, tol.stochastic);
        out.result = report_to_json(report);
        out.code = report.ok() ? Exit::ok : Exit::negative;
        out.summary = report.ok() ? "model ok" : std::to_string(report.violations.size()) + " violation(s)";
        return out;
    }
    require_valid(model, tol.stochastic);

    if (command == "absorb") {
        auto cert = certify_absorption(model, tol.fixpoint, cfg.max_sweeps);
        out.result = certificate_to_json(model, cert);
        out.code = cert.absorbing ? Exit::ok : Exit::negative;
        out.summary = cert.absorbing ? "absorbing, sup E[T] = " + out.result["expected_hitting_time"].dump()
                                     : "not absorbing";
    } else if (command == "occupancy") {
        require_absorbing(model);
        auto policy = any_policy_from_json(model, read_json_file(cfg.policy_path));
        auto mu = occupancy_of(model, policy, tol);
        out.result = occupancy_json(model, mu);
        out.summary = "residual " + out.result["residual"].dump();
    } else if (command == "face") {
        require_absorbing(model);
        std::vector<T> mu;
        if (!cfg.measure_path.empty())
            mu = measure_from_json(model, read_json_file(cfg.measure_path));
        else
            mu = occupancy_of(model, any_policy_from_json(model, read_json_file(cfg.policy_path)), tol).mass;
        auto face = parallel_subspace_basis<T>(model, mu, tol);
        if (cfg.alpha_constrained)
            attach_constrained_face<T>(model, mu, face);
        if (cfg.with_vertices)
            face.vertices = face_vertices<T>(model, mu, popt, tol);
        out.result = face_to_json(model, face);
        Json probes = Json::array();
        for (const auto& path : cfg.probes) {
            auto nu = measure_from_json(model, read_json_file(path));
            probes.push_back({{"probe", path},
                              {"face", face_membership<T>(model, mu, nu, tol)},
                              {"rai", rai_membership<T>(model, mu, nu, tol)},
                              {"affine_hull", affine_hull_membership<T>(model, mu, nu, tol)}});
        }
        out.result["probes"] = probes;
        out.summary = "dim F = " + std::to_string(face.dimension);
    } else if (command == "decompose") {
        int given = !cfg.policy_path.empty() + !cfg.measure_path.empty() + !cfg.alpha_text.empty();
        if (given != 1)
            throw CLI::ValidationError("decompose", "exactly one of --policy, --measure, --alpha is required");
        PerformanceDecomposition<T> dec;
        if (!cfg.alpha_text.empty()) {
            auto alpha = read_alpha(model, cfg.alpha_text);
            dec = decompose_alpha<T>(model, alpha, popt, tol);
        } else if (!cfg.measure_path.empty()) {
            auto mu = measure_from_json(model, read_json_file(cfg.measure_path));
            dec = decompose_performance<T>(model, mu, tol);
        } else {
            require_absorbing(model);
            auto mu = occupancy_of(model, any_policy_from_json(model, read_json_file(cfg.policy_path)), tol);
            dec = decompose_performance<T>(model, mu.mass, tol);
        }
        out.result = decomposition_json(model, dec);
        out.summary = "order " + std::to_string(dec.mixture.order()) + ", error " + out.result["verification"]["error"].dump();
    } else if (command == "minimal-order") {
        auto alpha = read_alpha(model, cfg.alpha_text);
        auto mo = minimal_order<T>(model, alpha, popt, tol);
        out.result = Json{{"alpha", vector_json(alpha)},
                          {"p_star", mo.p_star},
                          {"order", mo.order()},
                          {"witness", sparse_measure_to_json<T>(model, mo.witness)},
                          {"witness_dims",
                           {{"subspace", mo.witness_dims.subspace},
                            {"constrained", mo.witness_dims.constrained},
                            {"image", mo.witness_dims.image}}},
                          {"mixture", mixture_to_json(model, mo.mixture)},
                          {"vertices_examined", mo.vertices_examined}};
        if (cfg.brute_force) {
            std::size_t max_order = cfg.max_order ? cfg.max_order : model.reward_dim() + 1;
            auto bf = brute_force_min_order<T>(model, alpha, max_order, cfg.policy_cap, tol);
            out.result["brute_force"] = {{"order", bf ? Json(*bf) : Json(nullptr)},
                                         {"max_order", max_order},
                                         {"agrees", bf && *bf == mo.order()}};
        }
        out.summary = "p* = " + std::to_string(mo.p_star) + ", order " + std::to_string(mo.order());
    } else if (command == "simulate") {
        require_absorbing(model);
        auto policy = any_policy_from_json(model, read_json_file(cfg.policy_path));
        auto fmodel = convert_model<double>(model);
        SimOptions opt{cfg.episodes, cfg.seed, cfg.step_cap, cfg.jobs};
        auto est = estimate(fmodel, to_sim_policy(policy), opt);
        out.result = estimate_to_json(fmodel, est);
        if (est.truncation_warning)
            std::cerr << "warning: " << est.truncated << " of " << est.episodes << " episodes hit the step cap\n";
        if (cfg.compare_analytic) {
            auto mu = occupancy_of(model, policy, tol);
            auto perf = performance<T>(model, mu.mass);
            auto z = [](double sim, double exact, double se) -> Json {
                if (se > 0)
                    return (sim - exact) / se;
                return sim == exact ? Json(0.0) : Json(nullptr);
            };
            Json occ = Json::object();
            double max_z = 0.0;
            bool degenerate = false;
            auto track = [&](const Json& v) {
                if (v.is_null())
                    degenerate = true;
                else
                    max_z = std::max(max_z, std::fabs(v.get<double>()));
            };
            auto tp = model.pairs().transient_pairs();
            for (std::size_t i = 0; i < tp.size(); ++i) {
                double exact = to_double(mu.mass[i]);
                Json zi = z(est.occupancy[i], exact, est.occupancy_se[i]);
                track(zi);
                occ[model.pair_label(tp[i])] = {{"analytic", exact}, {"z", zi}};
            }
            Json pf = Json::array();
            for (std::size_t i = 0; i < perf.size(); ++i) {
                double exact = to_double(perf[i]);
                Json zi = z(est.performance[i], exact, est.performance_se[i]);
                track(zi);
                pf.push_back({{"analytic", exact}, {"z", zi}});
            }
            out.result["analytic"] = {{"occupancy", occ},
                                      {"performance", pf},
                                      {"max_abs_z", max_z},
                                      {"degenerate", degenerate},
                                      {"within_4_se", !degenerate && max_z <= 4.0}};
        }
        if (cfg.tail_horizon > 0) {
            auto bound = uniform_tail_bound(model);
            Json tail = Json::array();
            for (const auto& pt : tail_curve(est, cfg.tail_horizon))
                tail.push_back({{"n", pt.n}, {"value", pt.value}, {"se", pt.se}, {"bound", to_double(bound(pt.n))}});
            out.result["tail"] = tail;
        }
        out.summary = "mean absorption time " + std::to_string(est.absorption_time);
    }
    return out;
}

template <Scalar T>
Outcome run_lissage(const Config& cfg)
{
    Outcome out;
    auto doc = read_json_file(cfg.kernel_path);
    auto named = named_kernel_from_json<T>(doc);
    NamedKernel<T> smooth = named;
    smooth.kernel = lissage(named.kernel, Tolerances<T>::defaults().support);
    // Induced per-state distributions before and after, compared pairwise.
    bool same = true;
    T min_weight(1);
    for (std::size_t x = 0; x < named.states.size(); ++x) {
        std::vector<T> before(named.actions[x].size(), T(0)), after(named.actions[x].size(), T(0));
        for (std::size_t i = 0; i < named.kernel.order(); ++i) {
            before[named.kernel.selectors[i].choice[x]] += named.kernel.beta[x][i];
            after[smooth.kernel.selectors[i].choice[x]] += smooth.kernel.beta[x][i];
            min_weight = std::min(min_weight, smooth.kernel.beta[x][i]);
        }
        for (std::size_t a = 0; a < before.size(); ++a)
            if (!near_zero(T(before[a] - after[a]), Tolerances<T>::defaults().stochastic))
                same = false;
    }
    out.result = named_kernel_to_json(smooth);
    out.result["check"] = {{"same_induced_distributions", same}, {"min_weight", scalar_to_json(min_weight)}};
    out.summary = same ? "kernel canonicalized" : "induced distributions changed";
    if (!same)
        out.code = Exit::numeric;
    return out;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const NotAbsorbingError*>(&e))
        return Exit::negative;
    if (dynamic_cast<const InfeasibleError*>(&e))
        return Exit::infeasible;
    if (dynamic_cast<const CapExceededError*>(&e))
        return Exit::cap;
    if (dynamic_cast<const NumericError*>(&e))
        return Exit::numeric;
    return Exit::usage;
}

std::string error_type(const std::exception& e)
{
    if (dynamic_cast<const ParseError*>(&e))
        return "parse";
    if (dynamic_cast<const NotAbsorbingError*>(&e))
        return "not_absorbing";
    if (dynamic_cast<const InfeasibleError*>(&e))
        return "infeasible";
    if (dynamic_cast<const CapExceededError*>(&e))
        return "cap_exceeded";
    if (dynamic_cast<const NumericError*>(&e))
        return "numeric";
    if (dynamic_cast<const StructuralError*>(&e))
        return "structural";
    if (dynamic_cast<const InvalidArgument*>(&e))
        return "invalid_argument";
    return "error";
}

void emit(const Json& doc, bool pretty)
{
    std::cout << (pretty ? doc.dump(2) : doc.dump()) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Occupancy measures, faces and policy mixtures of finite absorbing models"};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub, bool needs_model) {
        if (needs_model)
            sub->add_option("model", cfg.model_path, "model JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--mode", cfg.mode_flag, "exact|float (overrides OCCLAB_MODE and the file)")
            ->check(CLI::IsMember({"exact", "float"}));
        sub->add_flag("--pretty", cfg.pretty, "indented JSON plus a one-line summary on stderr");
        sub->add_option("--tol-stochastic", cfg.tol_stochastic, "row-sum tolerance");
        sub->add_option("--tol-character", cfg.tol_character, "characteristic residual tolerance");
        sub->add_option("--tol-support", cfg.tol_support, "support threshold");
        sub->add_option("--tol-fixpoint", cfg.tol_fixpoint, "value-iteration span tolerance");
        sub->add_option("--rank-cutoff", cfg.rank_cutoff, "relative singular-value cutoff");
        sub->add_option("--vertex-cap", cfg.vertex_cap, "vertex enumeration cap");
        sub->add_option("--policy-cap", cfg.policy_cap, "deterministic policy enumeration cap");
        sub->add_option("--max-sweeps", cfg.max_sweeps, "value-iteration sweep cap");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check the model's standing assumptions");
    common(validate_cmd, true);

    auto* absorb_cmd = app.add_subcommand("absorb", "absorption certificate");
    common(absorb_cmd, true);

    auto* occupancy_cmd = app.add_subcommand("occupancy", "analytic occupancy measure of a policy");
    common(occupancy_cmd, true);
    occupancy_cmd->add_option("--policy", cfg.policy_path)->required()->check(CLI::ExistingFile);

    auto* face_cmd = app.add_subcommand("face", "face of the occupancy polytope through a measure");
    common(face_cmd, true);
    auto* face_measure = face_cmd->add_option("--measure", cfg.measure_path)->check(CLI::ExistingFile);
    auto* face_policy = face_cmd->add_option("--policy", cfg.policy_path)->check(CLI::ExistingFile);
    face_measure->excludes(face_policy);
    face_cmd->add_flag("--alpha-constrained", cfg.alpha_constrained);
    face_cmd->add_flag("--vertices", cfg.with_vertices, "enumerate the face's vertices");
    face_cmd->add_option("--probe", cfg.probes, "measure file(s) to test for membership")->check(CLI::ExistingFile);

    auto* decompose_cmd = app.add_subcommand("decompose", "mixture of order <= d+1 with the same performance");
    common(decompose_cmd, true);
    decompose_cmd->add_option("--policy", cfg.policy_path)->check(CLI::ExistingFile);
    decompose_cmd->add_option("--measure", cfg.measure_path)->check(CLI::ExistingFile);
    decompose_cmd->add_option("--alpha", cfg.alpha_text, "comma-separated performance vector");

    auto* minimal_cmd = app.add_subcommand("minimal-order", "minimal mixture order for a performance vector");
    common(minimal_cmd, true);
    minimal_cmd->add_option("--alpha", cfg.alpha_text)->required();
    minimal_cmd->add_flag("--brute-force", cfg.brute_force, "cross-check by enumerating deterministic policies");
    minimal_cmd->add_option("--max-order", cfg.max_order, "brute-force search limit (default d+1)");

    auto* lissage_cmd = app.add_subcommand("lissage", "canonicalize a chattering kernel");
    common(lissage_cmd, false);
    lissage_cmd->add_option("--kernel", cfg.kernel_path)->required()->check(CLI::ExistingFile);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a policy");
    common(simulate_cmd, true);
    simulate_cmd->add_option("--policy", cfg.policy_path)->required()->check(CLI::ExistingFile);
    simulate_cmd->add_option("--episodes", cfg.episodes)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", cfg.seed);
    simulate_cmd->add_option("--step-cap", cfg.step_cap)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    simulate_cmd->add_flag("--compare-analytic", cfg.compare_analytic, "z-scores against the analytic values");
    simulate_cmd->add_option("--tail-horizon", cfg.tail_horizon, "emit the tail curve for n = 0..H");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Exit::ok : Exit::usage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Json doc;
    Outcome outcome;
    try {
        auto mode = resolve_mode(cfg);
        if (command == "lissage") {
            if (!mode) {
                auto kdoc = read_json_file(cfg.kernel_path);
                mode = kdoc.contains("mode") ? parse_mode(kdoc["mode"].get<std::string>()) : Mode::exact;
            }
            auto run = [&]<Scalar T>() {
                doc["config"] = config_json<T>(command, cfg, Tolerances<T>::defaults());
                outcome = run_lissage<T>(cfg);
            };
            if (*mode == Mode::exact)
                run.template operator()<Rational>();
            else
                run.template operator()<double>();
        } else {
            auto model = load_model(cfg.model_path, mode);
            std::visit(
                [&](const auto& m) {
                    using T = typename std::decay_t<decltype(m)>::scalar_type;
                    auto tol = resolve_tolerances<T>(cfg);
                    doc["config"] = config_json<T>(command, cfg, tol);
                    outcome = run_model_command<T>(command, cfg, m, tol);
                },
                model);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        doc["error"] = {{"type", "usage"}, {"message", e.what()}};
        emit(doc, cfg.pretty);
        return Exit::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        Json err{{"type", error_type(e)}, {"message", e.what()}};
        if (const auto* pe = dynamic_cast<const ParseError*>(&e))
            err["key_path"] = pe->key_path();
        if (const auto* na = dynamic_cast<const NotAbsorbingError*>(&e)) {
            Json w = Json::array();
            for (const auto& ec : na->witness())
                w.push_back({{"states", ec.states}, {"actions", ec.actions}});
            err["witness"] = w;
        }
        doc["error"] = err;
        emit(doc, cfg.pretty);
        return exit_code_for(e);
    }
    doc["result"] = outcome.result;
    emit(doc, cfg.pretty);
    if (cfg.pretty && !outcome.summary.empty())
        std::cerr << command << ": " << outcome.summary << '\n';
    return outcome.code;
}
