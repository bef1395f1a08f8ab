#include "occlab/io.hpp"

#include <fstream>
#include <map>
#include <set>

#include "occlab/errors.hpp"

namespace occlab {

namespace {

std::string join_path(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

const Json& require_key(const Json& doc, const std::string& key, const std::string& base)
{
    if (!doc.is_object())
        throw ParseError(base.empty() ? "<root>" : base, "expected an object");
    auto it = doc.find(key);
    if (it == doc.end())
        throw ParseError(join_path(base, key), "missing key");
    return *it;
}

void require_object(const Json& value, const std::string& path)
{
    if (!value.is_object())
        throw ParseError(path, "expected an object");
}

void require_array(const Json& value, const std::string& path)
{
    if (!value.is_array())
        throw ParseError(path, "expected an array");
}

std::string require_string(const Json& value, const std::string& path)
{
    if (!value.is_string())
        throw ParseError(path, "expected a string");
    return value.get<std::string>();
}

std::vector<std::string> string_list(const Json& value, const std::string& path)
{
    require_array(value, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value.size(); ++i)
        out.push_back(require_string(value[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

template <Scalar T>
std::size_t lookup_state(const Mdp<T>& model, const std::string& name, const std::string& path)
{
    for (std::size_t x = 0; x < model.num_states(); ++x)
        if (model.state_name(x) == name)
            return x;
    throw ParseError(path, "unknown state '" + name + "'");
}

template <Scalar T>
std::size_t lookup_action(const Mdp<T>& model, std::size_t x, const std::string& name, const std::string& path)
{
    const auto& list = model.actions(x);
    for (std::size_t a = 0; a < list.size(); ++a)
        if (list[a] == name)
            return a;
    throw ParseError(path, "unknown action '" + name + "' at state '" + model.state_name(x) + "'");
}

template <Scalar T>
void fill_model(Mdp<T>& model, const Json& doc)
{
    if (auto it = doc.find("transition"); it != doc.end()) {
        require_object(*it, "transition");
        for (const auto& [sname, per_state] : it->items()) {
            std::string spath = "transition." + sname;
            std::size_t x = lookup_state(model, sname, spath);
            require_object(per_state, spath);
            for (const auto& [aname, row] : per_state.items()) {
                std::string apath = spath + "." + aname;
                std::size_t k = model.pairs().id(x, lookup_action(model, x, aname, apath));
                require_object(row, apath);
                for (const auto& [yname, value] : row.items()) {
                    std::string ypath = apath + "." + yname;
                    model.transition(k, lookup_state(model, yname, ypath)) = scalar_from_json<T>(value, ypath);
                }
            }
        }
    }
    const Json& initial = require_key(doc, "initial", "");
    require_object(initial, "initial");
    for (const auto& [sname, value] : initial.items()) {
        std::string path = "initial." + sname;
        model.initial()[lookup_state(model, sname, path)] = scalar_from_json<T>(value, path);
    }
    if (auto it = doc.find("rewards"); it != doc.end()) {
        require_object(*it, "rewards");
        for (const auto& [sname, per_state] : it->items()) {
            std::string spath = "rewards." + sname;
            std::size_t x = lookup_state(model, sname, spath);
            require_object(per_state, spath);
            for (const auto& [aname, vec] : per_state.items()) {
                std::string apath = spath + "." + aname;
                std::size_t k = model.pairs().id(x, lookup_action(model, x, aname, apath));
                require_array(vec, apath);
                if (vec.size() != model.reward_dim())
                    throw ParseError(apath, "expected " + std::to_string(model.reward_dim()) +
                                                " reward components, got " + std::to_string(vec.size()));
                for (std::size_t i = 0; i < vec.size(); ++i)
                    model.reward(k)[i] = scalar_from_json<T>(vec[i], apath + "[" + std::to_string(i) + "]");
            }
        }
    }
}

template <Scalar T>
std::vector<DeterministicPolicy> selector_list(const Mdp<T>& model, const Json& list, const std::string& path)
{
    require_array(list, path);
    std::vector<DeterministicPolicy> out;
    for (std::size_t j = 0; j < list.size(); ++j)
        out.push_back(selector_from_json(model, list[j], path + "[" + std::to_string(j) + "]"));
    return out;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path.string(), "cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), e.what());
    }
}

template <Scalar T>
T scalar_from_json(const Json& value, const std::string& key_path)
{
    try {
        if (value.is_string())
            return scalar_from_rational<T>(parse_rational(value.get<std::string>()));
        if (value.is_number_integer()) {
            if constexpr (is_exact_v<T>)
                return value.is_number_unsigned() ? Rational(value.get<std::uint64_t>())
                                                  : Rational(value.get<std::int64_t>());
            else
                return static_cast<double>(value.get<std::int64_t>());
        }
        if (value.is_number_float()) {
            if constexpr (is_exact_v<T>)
                return parse_rational(value.dump());
            else
                return value.get<double>();
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(key_path, e.what());
    }
    throw ParseError(key_path, "expected a number or a numeric string");
}

template <Scalar T>
Json scalar_to_json(const T& value)
{
    if constexpr (is_exact_v<T>)
        return format_rational(value);
    else
        return value;
}

template <Scalar T>
std::vector<T> parse_vector(std::string_view text)
{
    std::vector<T> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? comma : comma - start);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        if (item.empty())
            throw InvalidArgument("empty entry in vector '" + std::string(text) + "'");
        out.push_back(scalar_from_rational<T>(parse_rational(item)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

AnyMdp model_from_json(const Json& doc, std::optional<Mode> mode_override)
{
    if (!doc.is_object())
        throw ParseError("<root>", "expected an object");
    Mode mode = Mode::floating;
    if (auto it = doc.find("mode"); it != doc.end()) {
        try {
            mode = parse_mode(require_string(*it, "mode"));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError("mode", e.what());
        }
    }
    if (mode_override)
        mode = *mode_override;

    auto states = string_list(require_key(doc, "states", ""), "states");
    auto absorbing = string_list(require_key(doc, "absorbing", ""), "absorbing");
    const Json& actions_doc = require_key(doc, "actions", "");
    require_object(actions_doc, "actions");
    std::vector<std::vector<std::string>> actions(states.size());
    for (const auto& [sname, list] : actions_doc.items()) {
        auto it = std::find(states.begin(), states.end(), sname);
        if (it == states.end())
            throw ParseError("actions." + sname, "unknown state '" + sname + "'");
        actions[static_cast<std::size_t>(it - states.begin())] = string_list(list, "actions." + sname);
    }
    const Json& rd = require_key(doc, "reward_dim", "");
    if (!rd.is_number_integer() || rd.get<std::int64_t>() < 1)
        throw ParseError("reward_dim", "expected a positive integer");
    auto reward_dim = static_cast<std::size_t>(rd.get<std::int64_t>());

    for (std::size_t i = 0; i < absorbing.size(); ++i)
        if (std::find(states.begin(), states.end(), absorbing[i]) == states.end())
            throw ParseError("absorbing[" + std::to_string(i) + "]", "unknown state '" + absorbing[i] + "'");

    auto build = [&]<Scalar T>() -> AnyMdp {
        std::optional<Mdp<T>> model;
        try {
            model.emplace(states, absorbing, actions, reward_dim);
        } catch (const StructuralError& e) {
            throw ParseError("states", e.what());
        }
        fill_model(*model, doc);
        return std::move(*model);
    };
    if (mode == Mode::exact)
        return build.template operator()<Rational>();
    return build.template operator()<double>();
}

AnyMdp load_model(const std::filesystem::path& path, std::optional<Mode> mode_override)
{
    return model_from_json(read_json_file(path), mode_override);
}

template <Scalar T>
Json model_to_json(const Mdp<T>& model)
{
    const auto& pairs = model.pairs();
    Json doc;
    doc["mode"] = to_string(model.mode());
    doc["states"] = model.states();
    Json absorbing = Json::array();
    for (std::size_t x = 0; x < model.num_states(); ++x)
        if (model.is_absorbing(x))
            absorbing.push_back(model.state_name(x));
    doc["absorbing"] = absorbing;
    Json actions = Json::object();
    Json transition = Json::object();
    Json rewards = Json::object();
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        const auto& s = model.state_name(x);
        actions[s] = model.actions(x);
        if (model.actions(x).empty())
            continue;
        transition[s] = Json::object();
        rewards[s] = Json::object();
        for (std::size_t a = 0; a < model.actions(x).size(); ++a) {
            std::size_t k = pairs.id(x, a);
            Json row = Json::object();
            for (std::size_t y = 0; y < model.num_states(); ++y)
                if (model.transition(k, y) != T(0))
                    row[model.state_name(y)] = scalar_to_json(model.transition(k, y));
            transition[s][model.actions(x)[a]] = row;
            Json r = Json::array();
            for (const auto& v : model.reward(k))
                r.push_back(scalar_to_json(v));
            rewards[s][model.actions(x)[a]] = r;
        }
    }
    doc["actions"] = actions;
    doc["transition"] = transition;
    Json initial = Json::object();
    for (std::size_t x = 0; x < model.num_states(); ++x)
        if (model.initial()[x] != T(0))
            initial[model.state_name(x)] = scalar_to_json(model.initial()[x]);
    doc["initial"] = initial;
    doc["reward_dim"] = model.reward_dim();
    doc["rewards"] = rewards;
    return doc;
}

template <Scalar T>
DeterministicPolicy selector_from_json(const Mdp<T>& model, const Json& map, const std::string& key_path)
{
    require_object(map, key_path);
    DeterministicPolicy out = default_selector(model);
    std::vector<bool> seen(model.num_states(), false);
    for (const auto& [sname, aname] : map.items()) {
        std::string path = join_path(key_path, sname);
        std::size_t x = lookup_state(model, sname, path);
        out.choice[x] = lookup_action(model, x, require_string(aname, path), path);
        seen[x] = true;
    }
    for (auto x : model.pairs().transient_states())
        if (!seen[x])
            throw ParseError(join_path(key_path, model.state_name(x)), "missing transient state");
    return out;
}

template <Scalar T>
StationaryPolicy<T> policy_from_json(const Mdp<T>& model, const Json& doc)
{
    const Json& map = require_key(doc, "policy", "");
    require_object(map, "policy");
    StationaryPolicy<T> out = as_stationary(model, default_selector(model));
    std::vector<bool> seen(model.num_states(), false);
    for (const auto& [sname, dist] : map.items()) {
        std::string spath = "policy." + sname;
        std::size_t x = lookup_state(model, sname, spath);
        require_object(dist, spath);
        std::fill(out.prob[x].begin(), out.prob[x].end(), T(0));
        for (const auto& [aname, value] : dist.items()) {
            std::string apath = spath + "." + aname;
            out.prob[x][lookup_action(model, x, aname, apath)] = scalar_from_json<T>(value, apath);
        }
        seen[x] = true;
    }
    for (auto x : model.pairs().transient_states())
        if (!seen[x])
            throw ParseError("policy." + model.state_name(x), "missing transient state");
    return out;
}

template <Scalar T>
MixturePolicy<T> mixture_from_json(const Mdp<T>& model, const Json& doc)
{
    MixturePolicy<T> out;
    const Json& weights = require_key(doc, "weights", "");
    require_array(weights, "weights");
    for (std::size_t j = 0; j < weights.size(); ++j)
        out.weights.push_back(scalar_from_json<T>(weights[j], "weights[" + std::to_string(j) + "]"));
    out.selectors = selector_list(model, require_key(doc, "selectors", ""), "selectors");
    if (out.selectors.size() != out.weights.size())
        throw ParseError("selectors", "expected " + std::to_string(out.weights.size()) + " selectors");
    return out;
}

template <Scalar T>
ChatteringKernel<T> kernel_from_json(const Mdp<T>& model, const Json& doc)
{
    ChatteringKernel<T> out;
    out.selectors = selector_list(model, require_key(doc, "selectors", ""), "selectors");
    const std::size_t p = out.selectors.size();
    if (auto it = doc.find("order"); it != doc.end())
        if (!it->is_number_integer() || it->get<std::int64_t>() != static_cast<std::int64_t>(p))
            throw ParseError("order", "does not match the number of selectors");
    const Json& beta = require_key(doc, "beta", "");
    require_object(beta, "beta");
    out.beta.assign(model.num_states(), std::vector<T>(p, T(0)));
    std::vector<bool> seen(model.num_states(), false);
    for (const auto& [sname, weights] : beta.items()) {
        std::string spath = "beta." + sname;
        std::size_t x = lookup_state(model, sname, spath);
        require_array(weights, spath);
        if (weights.size() != p)
            throw ParseError(spath, "expected " + std::to_string(p) + " weights");
        for (std::size_t i = 0; i < p; ++i)
            out.beta[x][i] = scalar_from_json<T>(weights[i], spath + "[" + std::to_string(i) + "]");
        seen[x] = true;
    }
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        if (seen[x])
            continue;
        if (!model.is_absorbing(x))
            throw ParseError("beta." + model.state_name(x), "missing transient state");
        if (p > 0)
            out.beta[x][0] = T(1);
    }
    return out;
}

template <Scalar T>
AnyPolicy<T> any_policy_from_json(const Mdp<T>& model, const Json& doc)
{
    if (!doc.is_object())
        throw ParseError("<root>", "expected an object");
    if (doc.contains("selector"))
        return selector_from_json(model, doc["selector"], "selector");
    if (doc.contains("policy"))
        return policy_from_json(model, doc);
    if (doc.contains("beta"))
        return kernel_from_json(model, doc);
    if (doc.contains("weights"))
        return mixture_from_json(model, doc);
    throw ParseError("<root>", "expected one of the keys selector, policy, beta, weights");
}

template <Scalar T>
std::vector<T> measure_from_json(const Mdp<T>& model, const Json& doc)
{
    const Json& map = require_key(doc, "measure", "");
    require_object(map, "measure");
    const auto& pairs = model.pairs();
    std::vector<T> mass(pairs.transient_pairs().size(), T(0));
    for (const auto& [sname, per_state] : map.items()) {
        std::string spath = "measure." + sname;
        std::size_t x = lookup_state(model, sname, spath);
        require_object(per_state, spath);
        for (const auto& [aname, value] : per_state.items()) {
            std::string apath = spath + "." + aname;
            std::size_t k = pairs.id(x, lookup_action(model, x, aname, apath));
            T v = scalar_from_json<T>(value, apath);
            auto pos = pairs.transient_pair_position(k);
            if (!pos) {
                if (v != T(0))
                    throw ParseError(apath, "absorbing pairs carry no mass");
                continue;
            }
            mass[*pos] = v;
        }
    }
    return mass;
}

template <Scalar T>
Json policy_to_json(const Mdp<T>& model, const StationaryPolicy<T>& policy)
{
    Json map = Json::object();
    for (auto x : model.pairs().transient_states()) {
        Json dist = Json::object();
        for (std::size_t a = 0; a < model.actions(x).size(); ++a)
            dist[model.actions(x)[a]] = scalar_to_json(policy.prob[x][a]);
        map[model.state_name(x)] = dist;
    }
    return Json{{"policy", map}};
}

template <Scalar T>
Json selector_to_json(const Mdp<T>& model, const DeterministicPolicy& selector)
{
    Json map = Json::object();
    for (auto x : model.pairs().transient_states())
        map[model.state_name(x)] = model.actions(x)[selector.choice[x]];
    return map;
}

template <Scalar T>
Json mixture_to_json(const Mdp<T>& model, const MixturePolicy<T>& mixture)
{
    Json weights = Json::array();
    for (const auto& w : mixture.weights)
        weights.push_back(scalar_to_json(w));
    Json selectors = Json::array();
    for (const auto& s : mixture.selectors)
        selectors.push_back(selector_to_json(model, s));
    return Json{{"weights", weights}, {"selectors", selectors}};
}

template <Scalar T>
Json kernel_to_json(const Mdp<T>& model, const ChatteringKernel<T>& kernel)
{
    Json selectors = Json::array();
    for (const auto& s : kernel.selectors)
        selectors.push_back(selector_to_json(model, s));
    Json beta = Json::object();
    for (auto x : model.pairs().transient_states()) {
        Json row = Json::array();
        for (const auto& w : kernel.beta[x])
            row.push_back(scalar_to_json(w));
        beta[model.state_name(x)] = row;
    }
    return Json{{"order", kernel.order()}, {"selectors", selectors}, {"beta", beta}};
}

template <Scalar T>
Json measure_to_json(const Mdp<T>& model, std::span<const T> mass)
{
    Json map = Json::object();
    auto tp = model.pairs().transient_pairs();
    for (std::size_t i = 0; i < tp.size(); ++i) {
        std::size_t x = model.pairs().state_of(tp[i]);
        map[model.state_name(x)][model.actions(x)[model.pairs().action_of(tp[i])]] = scalar_to_json(mass[i]);
    }
    return map;
}

template <Scalar T>
Json sparse_measure_to_json(const Mdp<T>& model, std::span<const T> mass)
{
    Json map = Json::object();
    auto tp = model.pairs().transient_pairs();
    for (std::size_t i = 0; i < tp.size(); ++i)
        if (mass[i] != T(0))
            map[model.pair_label(tp[i])] = scalar_to_json(mass[i]);
    return map;
}

template <Scalar T>
NamedKernel<T> named_kernel_from_json(const Json& doc)
{
    NamedKernel<T> out;
    const Json& beta = require_key(doc, "beta", "");
    require_object(beta, "beta");
    for (const auto& [sname, weights] : beta.items())
        out.states.push_back(sname);
    out.actions.resize(out.states.size());
    const Json& selectors = require_key(doc, "selectors", "");
    require_array(selectors, "selectors");
    const std::size_t p = selectors.size();
    if (auto it = doc.find("order"); it != doc.end())
        if (!it->is_number_integer() || it->get<std::int64_t>() != static_cast<std::int64_t>(p))
            throw ParseError("order", "does not match the number of selectors");
    for (std::size_t j = 0; j < p; ++j) {
        std::string jpath = "selectors[" + std::to_string(j) + "]";
        require_object(selectors[j], jpath);
        DeterministicPolicy sel{std::vector<std::size_t>(out.states.size(), 0)};
        std::vector<bool> seen(out.states.size(), false);
        for (const auto& [sname, aname] : selectors[j].items()) {
            std::string path = jpath + "." + sname;
            auto it = std::find(out.states.begin(), out.states.end(), sname);
            if (it == out.states.end())
                throw ParseError(path, "state '" + sname + "' has no beta entry");
            auto x = static_cast<std::size_t>(it - out.states.begin());
            std::string action = require_string(aname, path);
            auto& list = out.actions[x];
            auto at = std::find(list.begin(), list.end(), action);
            if (at == list.end())
                at = list.insert(list.end(), action);
            sel.choice[x] = static_cast<std::size_t>(at - list.begin());
            seen[x] = true;
        }
        for (std::size_t x = 0; x < out.states.size(); ++x)
            if (!seen[x])
                throw ParseError(jpath + "." + out.states[x], "missing state");
        out.kernel.selectors.push_back(std::move(sel));
    }
    for (const auto& [sname, weights] : beta.items()) {
        std::string spath = "beta." + sname;
        require_array(weights, spath);
        if (weights.size() != p)
            throw ParseError(spath, "expected " + std::to_string(p) + " weights");
        std::vector<T> row;
        T sum(0);
        for (std::size_t i = 0; i < p; ++i) {
            row.push_back(scalar_from_json<T>(weights[i], spath + "[" + std::to_string(i) + "]"));
            if (row.back() < T(0))
                throw ParseError(spath + "[" + std::to_string(i) + "]", "negative weight");
            sum += row.back();
        }
        if (!near_zero(T(sum - T(1)), Tolerances<T>::defaults().stochastic))
            throw ParseError(spath, "weights do not sum to 1");
        out.kernel.beta.push_back(std::move(row));
    }
    return out;
}

template <Scalar T>
Json named_kernel_to_json(const NamedKernel<T>& kernel)
{
    Json selectors = Json::array();
    for (const auto& sel : kernel.kernel.selectors) {
        Json map = Json::object();
        for (std::size_t x = 0; x < kernel.states.size(); ++x)
            map[kernel.states[x]] = kernel.actions[x][sel.choice[x]];
        selectors.push_back(map);
    }
    Json beta = Json::object();
    for (std::size_t x = 0; x < kernel.states.size(); ++x) {
        Json row = Json::array();
        for (const auto& w : kernel.kernel.beta[x])
            row.push_back(scalar_to_json(w));
        beta[kernel.states[x]] = row;
    }
    return Json{{"order", kernel.kernel.order()}, {"selectors", selectors}, {"beta", beta}};
}

Json report_to_json(const ValidationReport& report)
{
    Json violations = Json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"location", v.location}, {"kind", to_string(v.kind)}, {"magnitude", v.magnitude}});
    return Json{{"ok", report.ok()}, {"violations", violations}};
}

template <Scalar T>
Json certificate_to_json(const Mdp<T>& model, const AbsorptionCertificate<T>& cert)
{
    Json doc;
    doc["verdict"] = cert.absorbing ? "absorbing" : "not_absorbing";
    Json witness = Json::array();
    for (const auto& ec : cert.mec_witness) {
        Json states = Json::array();
        Json actions = Json::object();
        for (std::size_t i = 0; i < ec.states.size(); ++i) {
            std::size_t x = ec.states[i];
            states.push_back(model.state_name(x));
            Json names = Json::array();
            for (auto a : ec.actions[i])
                names.push_back(model.actions(x)[a]);
            actions[model.state_name(x)] = names;
        }
        witness.push_back({{"states", states}, {"actions", actions}});
    }
    doc["mec_witness"] = witness;
    if (cert.hitting) {
        Json v = Json::object();
        for (std::size_t x = 0; x < model.num_states(); ++x)
            v[model.state_name(x)] = scalar_to_json(cert.hitting->value[x]);
        doc["v"] = v;
        doc["expected_hitting_time"] = scalar_to_json(cert.hitting->expected);
        doc["worst_selector"] = selector_to_json(model, cert.hitting->worst);
        doc["iterations"] = cert.hitting->iterations;
        doc["fixpoint_residual"] = cert.hitting->fixpoint_residual;
    }
    if (cert.tail) {
        doc["N"] = cert.tail->horizon;
        doc["epsilon"] = scalar_to_json(cert.tail->epsilon);
        doc["tail_bound"] = "N * (1 - epsilon)^floor(n / N) / epsilon";
        doc["uniformly_absorbing"] = true;
    } else {
        doc["uniformly_absorbing"] = false;
    }
    return doc;
}

template <Scalar T>
Json tolerances_to_json(const Tolerances<T>& tol)
{
    return Json{{"mode", to_string(mode_of_v<T>)},
                {"stochastic", scalar_to_json(tol.stochastic)},
                {"character", scalar_to_json(tol.character)},
                {"support", scalar_to_json(tol.support)},
                {"fixpoint", tol.fixpoint},
                {"rank_cutoff", tol.rank_cutoff}};
}

template <Scalar T>
Json face_to_json(const Mdp<T>& model, const FaceDescriptor<T>& face)
{
    Json doc;
    Json support = Json::array();
    for (auto i : face.support)
        support.push_back(model.pair_label(model.pairs().transient_pairs()[i]));
    doc["support"] = support;
    doc["dimension"] = face.dimension;
    Json basis = Json::array();
    for (const auto& v : face.basis)
        basis.push_back(sparse_measure_to_json<T>(model, v));
    doc["basis"] = basis;
    if (face.constrained) {
        const auto& c = *face.constrained;
        Json alpha = Json::array();
        for (const auto& a : c.alpha)
            alpha.push_back(scalar_to_json(a));
        Json kernel = Json::array();
        for (const auto& v : c.kernel_basis)
            kernel.push_back(sparse_measure_to_json<T>(model, v));
        doc["constrained"] = {{"alpha", alpha},
                              {"kernel_dim", c.kernel_dim},
                              {"image_dim", c.image_dim},
                              {"kernel_basis", kernel}};
    }
    if (face.vertices) {
        Json vertices = Json::array();
        for (const auto& v : *face.vertices)
            vertices.push_back(sparse_measure_to_json<T>(model, v));
        doc["vertices"] = vertices;
    }
    doc["numerics"] = tolerances_to_json(face.numerics);
    return doc;
}

Json estimate_to_json(const FloatMdp& model, const SimEstimate& est)
{
    Json occupancy = Json::object();
    auto tp = model.pairs().transient_pairs();
    for (std::size_t i = 0; i < tp.size(); ++i)
        occupancy[model.pair_label(tp[i])] = {{"mean", est.occupancy[i]}, {"se", est.occupancy_se[i]}};
    Json performance = Json::array();
    for (std::size_t i = 0; i < est.performance.size(); ++i)
        performance.push_back({{"mean", est.performance[i]}, {"se", est.performance_se[i]}});
    Json histogram = Json::object();
    for (const auto& [len, count] : est.length_histogram)
        histogram[std::to_string(len)] = count;
    return Json{{"episodes", est.episodes},
                {"seed", est.seed},
                {"step_cap", est.step_cap},
                {"rng", "philox4x32-10"},
                {"occupancy", occupancy},
                {"absorption_time", {{"mean", est.absorption_time}, {"se", est.absorption_time_se}}},
                {"performance", performance},
                {"truncated", est.truncated},
                {"truncation_warning", est.truncation_warning},
                {"length_histogram", histogram}};
}

#define OCCLAB_INSTANTIATE(T)                                                                             \
    template T scalar_from_json<T>(const Json&, const std::string&);                                      \
    template Json scalar_to_json(const T&);                                                               \
    template std::vector<T> parse_vector<T>(std::string_view);                                            \
    template Json model_to_json(const Mdp<T>&);                                                           \
    template AnyPolicy<T> any_policy_from_json(const Mdp<T>&, const Json&);                               \
    template StationaryPolicy<T> policy_from_json(const Mdp<T>&, const Json&);                            \
    template DeterministicPolicy selector_from_json(const Mdp<T>&, const Json&, const std::string&);      \
    template MixturePolicy<T> mixture_from_json(const Mdp<T>&, const Json&);                              \
    template ChatteringKernel<T> kernel_from_json(const Mdp<T>&, const Json&);                            \
    template std::vector<T> measure_from_json(const Mdp<T>&, const Json&);                                \
    template Json policy_to_json(const Mdp<T>&, const StationaryPolicy<T>&);                              \
    template Json selector_to_json(const Mdp<T>&, const DeterministicPolicy&);                            \
    template Json mixture_to_json(const Mdp<T>&, const MixturePolicy<T>&);                                \
    template Json kernel_to_json(const Mdp<T>&, const ChatteringKernel<T>&);                              \
    template Json measure_to_json(const Mdp<T>&, std::span<const T>);                                     \
    template Json sparse_measure_to_json(const Mdp<T>&, std::span<const T>);                              \
    template NamedKernel<T> named_kernel_from_json<T>(const Json&);                                       \
    template Json named_kernel_to_json(const NamedKernel<T>&);                                            \
    template Json certificate_to_json(const Mdp<T>&, const AbsorptionCertificate<T>&);                    \
    template Json tolerances_to_json(const Tolerances<T>&);                                               \
    template Json face_to_json(const Mdp<T>&, const FaceDescriptor<T>&);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
