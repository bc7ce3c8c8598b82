#include "twoport/netlist.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "twoport/blocks.hpp"
#include "twoport/compose.hpp"

namespace twoport {

namespace {

using json = nlohmann::json;

const std::set<std::string> converter_kinds = {"boost_ccm", "buck_ccm"};
const std::set<std::string> passive_kinds = {"resistor", "lc_filter"};
const std::set<std::string> controller_kinds = {"controller_type1",
                                                "controller_type2",
                                                "controller_type3"};

bool is_controller_kind(const std::string& kind) {
    return controller_kinds.count(kind) > 0;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw schema_violation("unknown key '" + key + "' in " + where);
    }
}

double number_at(const json& obj, const std::string& key,
                 const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw schema_violation("'" + key + "' in " + where + " must be a number");
    return v.get<double>();
}

// Per-kind parameter vocabulary. Pairs like t_z/f_z are mutually exclusive
// spellings of the same time constant (seconds vs hertz).
void check_params(const std::string& kind,
                  const std::map<std::string, double>& params,
                  const std::string& where) {
    auto has = [&](const char* k) { return params.count(k) > 0; };
    auto require = [&](const char* k) {
        if (!has(k))
            throw schema_violation(where + ": missing required param '" +
                                   std::string(k) + "'");
    };
    auto one_of = [&](const char* a, const char* b) {
        if (has(a) == has(b))
            throw schema_violation(where + ": exactly one of '" + a + "'/'" + b +
                                   "' must be given");
    };
    std::set<std::string> allowed;
    if (kind == "resistor") {
        allowed = {"r"};
        require("r");
    } else if (kind == "lc_filter" || converter_kinds.count(kind)) {
        allowed = {"l", "c", "r_l", "r_c"};
        if (converter_kinds.count(kind)) allowed.insert("f_switch");
        require("l");
        require("c");
    } else if (kind == "controller_type1") {
        allowed = {"k_i"};
        require("k_i");
    } else if (kind == "controller_type2") {
        allowed = {"k_i", "t_z", "f_z", "t_p", "f_p"};
        require("k_i");
        one_of("t_z", "f_z");
        one_of("t_p", "f_p");
    } else if (kind == "controller_type3") {
        allowed = {"k_i", "t_z1", "f_z1", "t_z2", "f_z2",
                   "t_p1", "f_p1", "t_p2", "f_p2"};
        require("k_i");
        one_of("t_z1", "f_z1");
        one_of("t_z2", "f_z2");
        one_of("t_p1", "f_p1");
        one_of("t_p2", "f_p2");
    } else {
        throw schema_violation(where + ": unknown kind '" + kind + "'");
    }
    for (const auto& [key, value] : params) {
        (void)value;
        if (!allowed.count(key))
            throw schema_violation(where + ": unknown param '" + key +
                                   "' for kind '" + kind + "'");
    }
}

block_decl parse_block(const json& j, const std::string& name) {
    const std::string where = "block '" + name + "'";
    if (!j.is_object())
        throw schema_violation(where + " must be an object");
    check_keys(j, {"kind", "params", "operating_point"}, where);
    block_decl decl;
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw schema_violation(where + " needs a string 'kind'");
    decl.kind = j.at("kind").get<std::string>();
    if (!j.contains("params") || !j.at("params").is_object())
        throw schema_violation(where + " needs an object 'params'");
    for (const auto& [key, value] : j.at("params").items()) {
        if (!value.is_number())
            throw schema_violation(where + ": param '" + key +
                                   "' must be a number");
        decl.params[key] = value.get<double>();
    }
    check_params(decl.kind, decl.params, where);

    const bool needs_op = converter_kinds.count(decl.kind) > 0;
    if (j.contains("operating_point")) {
        if (!needs_op)
            throw schema_violation(where +
                                   ": operating_point only applies to converters");
        const auto& op = j.at("operating_point");
        if (!op.is_object())
            throw schema_violation(where + ": operating_point must be an object");
        check_keys(op, {"v_in", "v_out", "i_out"}, where + " operating_point");
        op_decl d;
        d.v_in = number_at(op, "v_in", where);
        d.v_out = number_at(op, "v_out", where);
        d.i_out = number_at(op, "i_out", where);
        decl.operating_point = d;
    } else if (needs_op) {
        throw schema_violation(where + ": converter needs an operating_point");
    }
    return decl;
}

}  // namespace

netlist_doc parse_netlist(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("netlist: ") + e.what());
    }
    if (!j.is_object())
        throw schema_violation("top level must be an object");
    check_keys(j, {"blocks", "loops", "cascade", "order"}, "netlist");

    netlist_doc doc;
    if (!j.contains("blocks") || !j.at("blocks").is_object())
        throw schema_violation("netlist needs an object 'blocks'");
    for (const auto& [name, entry] : j.at("blocks").items())
        doc.blocks.emplace(name, parse_block(entry, name));

    if (j.contains("order")) {
        if (!j.at("order").is_string())
            throw schema_violation("'order' must be a string");
        const auto order = j.at("order").get<std::string>();
        if (order == "loops_first")
            doc.order = apply_order::loops_first;
        else if (order == "cascade_first")
            doc.order = apply_order::cascade_first;
        else
            throw schema_violation("'order' must be loops_first or cascade_first");
    }

    if (j.contains("loops")) {
        if (!j.at("loops").is_array())
            throw schema_violation("'loops' must be an array");
        for (const auto& entry : j.at("loops")) {
            if (!entry.is_object())
                throw schema_violation("each loop must be an object");
            check_keys(entry, {"converter", "controller", "target", "ctl"},
                       "loop");
            loop_decl loop;
            for (const auto* key : {"converter", "controller", "target", "ctl"})
                if (!entry.contains(key) || !entry.at(key).is_string())
                    throw schema_violation(std::string("loop needs a string '") +
                                           key + "'");
            loop.converter = entry.at("converter").get<std::string>();
            loop.controller = entry.at("controller").get<std::string>();
            loop.target = entry.at("target").get<std::string>();
            loop.ctl = entry.at("ctl").get<std::string>();
            if (loop.target != "v_out" && loop.target.rfind("state:", 0) != 0)
                throw schema_violation(
                    "loop target must be 'v_out' or 'state:<label>'");
            if (loop.target.rfind("state:", 0) == 0 && loop.target.size() == 6)
                throw schema_violation("empty state label in loop target");
            doc.loops.push_back(std::move(loop));
        }
    }

    if (!j.contains("cascade") || !j.at("cascade").is_array())
        throw schema_violation("netlist needs an array 'cascade'");
    for (const auto& entry : j.at("cascade")) {
        if (!entry.is_string())
            throw schema_violation("cascade entries must be block names");
        doc.cascade.push_back(entry.get<std::string>());
    }
    if (doc.cascade.empty())
        throw schema_violation("cascade must contain at least one block");

    // Reference checks.
    for (const auto& name : doc.cascade) {
        auto it = doc.blocks.find(name);
        if (it == doc.blocks.end())
            throw unresolved_ref("cascade references missing block '" + name + "'");
        if (is_controller_kind(it->second.kind))
            throw schema_violation("controller '" + name +
                                   "' cannot appear in the cascade");
    }
    for (const auto& loop : doc.loops) {
        if (doc.order == apply_order::cascade_first) {
            if (loop.converter != "cascade")
                throw schema_violation(
                    "with order cascade_first, loop.converter must be 'cascade'");
        } else {
            auto it = doc.blocks.find(loop.converter);
            if (it == doc.blocks.end())
                throw unresolved_ref("loop references missing block '" +
                                     loop.converter + "'");
            if (is_controller_kind(it->second.kind))
                throw schema_violation("loop converter '" + loop.converter +
                                       "' must be a two-port block");
        }
        auto it = doc.blocks.find(loop.controller);
        if (it == doc.blocks.end())
            throw unresolved_ref("loop references missing block '" +
                                 loop.controller + "'");
        if (!is_controller_kind(it->second.kind))
            throw schema_violation("loop controller '" + loop.controller +
                                   "' must be a controller block");
    }
    return doc;
}

std::string serialize_netlist(const netlist_doc& doc) {
    json j;
    json blocks = json::object();
    for (const auto& [name, decl] : doc.blocks) {
        json b;
        b["kind"] = decl.kind;
        b["params"] = decl.params;
        if (decl.operating_point) {
            b["operating_point"] = {{"v_in", decl.operating_point->v_in},
                                    {"v_out", decl.operating_point->v_out},
                                    {"i_out", decl.operating_point->i_out}};
        }
        blocks[name] = std::move(b);
    }
    j["blocks"] = std::move(blocks);
    json loops = json::array();
    for (const auto& loop : doc.loops)
        loops.push_back({{"converter", loop.converter},
                         {"controller", loop.controller},
                         {"target", loop.target},
                         {"ctl", loop.ctl}});
    j["loops"] = std::move(loops);
    j["cascade"] = doc.cascade;
    j["order"] = doc.order == apply_order::loops_first ? "loops_first"
                                                       : "cascade_first";
    return j.dump(2) + "\n";
}

namespace {

double param_or(const block_decl& decl, const char* key, double fallback) {
    auto it = decl.params.find(key);
    return it == decl.params.end() ? fallback : it->second;
}

double param(const block_decl& decl, const char* key) {
    return decl.params.at(key);
}

lc_params lc_from(const block_decl& decl) {
    lc_params p;
    p.inductance = param(decl, "l");
    p.capacitance = param(decl, "c");
    p.inductor_esr = param_or(decl, "r_l", p.inductor_esr);
    p.capacitor_esr = param_or(decl, "r_c", p.capacitor_esr);
    return p;
}

// Accepts either the time constant itself or the corner frequency.
double time_const(const block_decl& decl, const char* t_key, const char* f_key) {
    auto it = decl.params.find(t_key);
    if (it != decl.params.end()) return it->second;
    return time_constant_from_frequency(param(decl, f_key));
}

controller_block instantiate_controller(const block_decl& decl) {
    controller_params p;
    p.integral_gain = param(decl, "k_i");
    if (decl.kind == "controller_type1") {
        p.kind = controller_kind::type1;
    } else if (decl.kind == "controller_type2") {
        p.kind = controller_kind::type2;
        p.t_z = time_const(decl, "t_z", "f_z");
        p.t_p = time_const(decl, "t_p", "f_p");
    } else if (decl.kind == "controller_type3") {
        p.kind = controller_kind::type3;
        p.t_z1 = time_const(decl, "t_z1", "f_z1");
        p.t_z2 = time_const(decl, "t_z2", "f_z2");
        p.t_p1 = time_const(decl, "t_p1", "f_p1");
        p.t_p2 = time_const(decl, "t_p2", "f_p2");
    } else {
        throw schema_violation("'" + decl.kind + "' is not a controller kind");
    }
    return controller(p);
}

int find_label(const std::vector<std::string>& labels, const std::string& name,
               const char* what) {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end())
        throw unresolved_ref("no " + std::string(what) + " labeled '" + name +
                             "'");
    return static_cast<int>(it - labels.begin());
}

state_space_block apply_loop(const state_space_block& blk, const loop_decl& loop,
                             const controller_block& ctrl) {
    if (blk.controls() == 0)
        throw no_control_input("loop '" + loop.ctl +
                               "': block has no control inputs");
    const int k = find_label(blk.control_labels(), loop.ctl, "control input");
    loop_target target = loop_target::output_voltage();
    if (loop.target.rfind("state:", 0) == 0) {
        const std::string label = loop.target.substr(6);
        target = loop_target::state(
            find_label(blk.state_labels(), label, "state"));
    }
    const row_vector c2 = blk.c2();
    const auto open = attach_controller_open_loop(blk, ctrl, k);
    const auto gain = make_feedback_gain(target, open, k, c2);
    return close_loop(open, gain);
}

}  // namespace

state_space_block instantiate_block(const block_decl& decl) {
    if (decl.kind == "resistor") return resistor(param(decl, "r"));
    if (decl.kind == "lc_filter") return lc_filter(lc_from(decl));
    if (decl.kind == "boost_ccm" || decl.kind == "buck_ccm") {
        if (!decl.operating_point)
            throw schema_violation("converter needs an operating_point");
        const auto topo = decl.kind == "boost_ccm" ? topology::boost
                                                   : topology::buck;
        const auto op =
            solve_operating_point(topo, decl.operating_point->v_in,
                                  decl.operating_point->v_out,
                                  decl.operating_point->i_out);
        return topo == topology::boost ? boost_ccm(lc_from(decl), op)
                                       : buck_ccm(lc_from(decl), op);
    }
    throw schema_violation("'" + decl.kind +
                           "' cannot be instantiated as a two-port block");
}

state_space_block build_model(const netlist_doc& doc) {
    if (doc.order == apply_order::cascade_first) {
        auto acc = instantiate_block(doc.blocks.at(doc.cascade.front()));
        for (std::size_t i = 1; i < doc.cascade.size(); ++i)
            acc = series_connect(
                acc, instantiate_block(doc.blocks.at(doc.cascade[i])));
        for (const auto& loop : doc.loops)
            acc = apply_loop(acc, loop,
                             instantiate_controller(doc.blocks.at(loop.controller)));
        return acc;
    }

    // loops_first: loops stack onto their named block, then the cascade folds
    // left to right (source to load).
    std::map<std::string, state_space_block> built;
    auto get_block = [&](const std::string& name) -> state_space_block& {
        auto it = built.find(name);
        if (it == built.end())
            it = built.emplace(name, instantiate_block(doc.blocks.at(name))).first;
        return it->second;
    };
    for (const auto& loop : doc.loops) {
        auto& blk = get_block(loop.converter);
        blk = apply_loop(blk, loop,
                         instantiate_controller(doc.blocks.at(loop.controller)));
    }
    auto acc = get_block(doc.cascade.front());
    for (std::size_t i = 1; i < doc.cascade.size(); ++i)
        acc = series_connect(acc, get_block(doc.cascade[i]));
    return acc;
}

}  // namespace twoport
