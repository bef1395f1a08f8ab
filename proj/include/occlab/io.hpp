/**
 * JSON reading and writing.
 *
 * Exact-mode numbers are written as strings in canonical "p/q" form; float
 * mode writes JSON numbers. On input both forms are accepted in either mode
 * (a JSON number read in exact mode is taken at its shortest decimal
 * spelling, so 0.1 means 1/10).
 *
 * Measures, policies and selectors are keyed by state and action names.
 * Policy and selector documents must cover every transient state; absorbing
 * states may be omitted and then get their first action.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "occlab/absorption.hpp"
#include "occlab/geometry.hpp"
#include "occlab/model.hpp"
#include "occlab/occupancy.hpp"
#include "occlab/policy.hpp"
#include "occlab/simulate.hpp"

namespace occlab {

using Json = nlohmann::ordered_json;
using AnyMdp = std::variant<ExactMdp, FloatMdp>;

Json read_json_file(const std::filesystem::path& path);

/// Scalar from a JSON number or string; ParseError names `key_path`.
template <Scalar T>
T scalar_from_json(const Json& value, const std::string& key_path);

template <Scalar T>
Json scalar_to_json(const T& value);

/// Comma-separated decimals or fractions, e.g. "2/3,0.5".
template <Scalar T>
std::vector<T> parse_vector(std::string_view text);

/**
 * Builds a model from a document. `mode_override` wins over the file's
 * "mode" key; float is used when neither is given. Schema violations raise
 * ParseError with the offending key path (e.g. "transition.s.a1.t").
 */
AnyMdp model_from_json(const Json& doc, std::optional<Mode> mode_override = std::nullopt);
AnyMdp load_model(const std::filesystem::path& path, std::optional<Mode> mode_override = std::nullopt);

template <Scalar T>
Json model_to_json(const Mdp<T>& model);

template <Scalar T>
using AnyPolicy = std::variant<DeterministicPolicy, StationaryPolicy<T>, ChatteringKernel<T>, MixturePolicy<T>>;

/// Dispatches on the top-level key: "selector", "policy", "beta" or "weights".
template <Scalar T>
AnyPolicy<T> any_policy_from_json(const Mdp<T>& model, const Json& doc);

template <Scalar T>
StationaryPolicy<T> policy_from_json(const Mdp<T>& model, const Json& doc);
template <Scalar T>
DeterministicPolicy selector_from_json(const Mdp<T>& model, const Json& map, const std::string& key_path);
template <Scalar T>
MixturePolicy<T> mixture_from_json(const Mdp<T>& model, const Json& doc);
template <Scalar T>
ChatteringKernel<T> kernel_from_json(const Mdp<T>& model, const Json& doc);
template <Scalar T>
std::vector<T> measure_from_json(const Mdp<T>& model, const Json& doc);

template <Scalar T>
Json policy_to_json(const Mdp<T>& model, const StationaryPolicy<T>& policy);
/// Transient states only.
template <Scalar T>
Json selector_to_json(const Mdp<T>& model, const DeterministicPolicy& selector);
template <Scalar T>
Json mixture_to_json(const Mdp<T>& model, const MixturePolicy<T>& mixture);
template <Scalar T>
Json kernel_to_json(const Mdp<T>& model, const ChatteringKernel<T>& kernel);
/// {state: {action: value}} over transient pairs; zero entries kept.
template <Scalar T>
Json measure_to_json(const Mdp<T>& model, std::span<const T> mass);
/// Same, dropping zero entries.
template <Scalar T>
Json sparse_measure_to_json(const Mdp<T>& model, std::span<const T> mass);

/**
 * A chattering kernel read without a model. States are taken from the keys
 * of "beta" and actions are numbered per state in order of first appearance
 * across the selectors.
 */
template <Scalar T>
struct NamedKernel {
    std::vector<std::string> states;
    std::vector<std::vector<std::string>> actions;
    ChatteringKernel<T> kernel;
};

template <Scalar T>
NamedKernel<T> named_kernel_from_json(const Json& doc);
template <Scalar T>
Json named_kernel_to_json(const NamedKernel<T>& kernel);

Json report_to_json(const ValidationReport& report);

template <Scalar T>
Json certificate_to_json(const Mdp<T>& model, const AbsorptionCertificate<T>& cert);

template <Scalar T>
Json tolerances_to_json(const Tolerances<T>& tol);

template <Scalar T>
Json face_to_json(const Mdp<T>& model, const FaceDescriptor<T>& face);

Json estimate_to_json(const FloatMdp& model, const SimEstimate& est);

}  // namespace occlab
