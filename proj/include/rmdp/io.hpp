#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rmdp/mdp.hpp"
#include "rmdp/robust_bellman.hpp"
#include "rmdp/solver.hpp"

namespace rmdp {

/// Malformed or structurally inconsistent model document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model file: the nominal MDP plus its uncertainty set.
struct MdpDocument {
    Mdp mdp;
    UncertaintySpec uncertainty;
};

/**
 * Parses the JSON model format:
 *
 *   { "num_states": S, "num_actions": A, "gamma": g,
 *     "reward": [[..A..] x S], "kernel": [[[..S..] x A] x S], "mu": [..S..],
 *     "uncertainty": { "rect": "sa" | "s" | "none", "p": number | "inf",
 *                      "alpha": ..., "beta": ... } }
 *
 * Radii are S x A arrays for "sa" and length-S arrays for "s"; a single
 * number is broadcast. Unknown keys are rejected. Model invariants
 * (row sums etc.) are not checked here; see validate_mdp.
 */
MdpDocument parse_mdp_document(std::string_view text);

MdpDocument load_mdp_file(const std::filesystem::path& path);

/// Inverse of parse_mdp_document; doubles are written in round-trip form.
std::string dump_mdp_document(const MdpDocument& doc);

/// JSON report of a solve, deterministic for identical inputs.
std::string solve_report(const SolveResult& res, const MdpDocument& doc,
                         const std::optional<PropertyReport>& properties);

} // namespace rmdp
