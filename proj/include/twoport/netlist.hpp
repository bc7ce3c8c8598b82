#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twoport/block.hpp"

namespace twoport {

/// Operating-point stanza of a converter entry.
struct op_decl {
    double v_in = 0.0;
    double v_out = 0.0;
    double i_out = 0.0;
    bool operator==(const op_decl&) const = default;
};

/// One named block entry: kind, numeric params (SI units only), and an
/// operating point for converter kinds.
struct block_decl {
    std::string kind;
    std::map<std::string, double> params;
    std::optional<op_decl> operating_point;
    bool operator==(const block_decl&) const = default;
};

/// One loop closure: attach `controller` to `converter`'s control input `ctl`
/// and close on `target` ("v_out" or "state:<label>").
struct loop_decl {
    std::string converter;
    std::string controller;
    std::string target;
    std::string ctl;
    bool operator==(const loop_decl&) const = default;
};

/// Whether loops are applied to the named blocks before cascading (default)
/// or to the finished cascade composite.
enum class apply_order { loops_first, cascade_first };

/// Declarative model description consumed by the CLI.
struct netlist_doc {
    std::map<std::string, block_decl> blocks;
    std::vector<loop_decl> loops;
    std::vector<std::string> cascade;
    apply_order order = apply_order::loops_first;
    bool operator==(const netlist_doc&) const = default;
};

/// Parses and validates a JSON netlist. Strict: unknown keys anywhere are
/// rejected (schema_violation), malformed JSON is a parse_error (with byte
/// position), and dangling references are unresolved_ref.
netlist_doc parse_netlist(const std::string& text);

/// Canonical JSON serialization; parse(serialize(doc)) == doc.
std::string serialize_netlist(const netlist_doc& doc);

/// Instantiates one declared block as a two-port block (controller kinds are
/// rejected here; they only appear inside loops).
state_space_block instantiate_block(const block_decl& decl);

/// Builds the composed model: loops and cascade in the document's order.
state_space_block build_model(const netlist_doc& doc);

}  // namespace twoport
