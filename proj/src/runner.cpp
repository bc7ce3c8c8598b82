#include "twoport/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

#include <json.hpp>

namespace twoport {

namespace {

using json = nlohmann::json;

transfer_kind query_kind(const std::string& name) {
    if (name == "control_to_output") return transfer_kind::control_to_output;
    if (name == "output_impedance") return transfer_kind::output_impedance;
    if (name == "input_admittance") return transfer_kind::input_admittance;
    if (name == "input_impedance") return transfer_kind::input_impedance;
    if (name == "forward_voltage_gain") return transfer_kind::forward_voltage_gain;
    if (name == "reverse_current_gain") return transfer_kind::reverse_current_gain;
    if (name == "ref_to_state") return transfer_kind::ref_to_state;
    throw schema_violation("unknown query '" + name + "'");
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stoi(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

int resolve_state(const state_space_block& model, const std::string& name) {
    int idx = 0;
    if (parse_int(name, idx)) {
        if (idx < 0 || idx >= model.states())
            throw unresolved_ref("state index " + name + " out of range");
        return idx;
    }
    const auto& labels = model.state_labels();
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end())
        throw unresolved_ref("no state labeled '" + name + "'");
    return static_cast<int>(it - labels.begin());
}

int resolve_input(const state_space_block& model, const std::string& name) {
    if (name == "v_in") return 0;
    if (name == "i_out") return 1;
    const auto& labels = model.control_labels();
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it != labels.end()) return 2 + static_cast<int>(it - labels.begin());
    int idx = 0;
    if (parse_int(name, idx)) {
        if (idx < 0 || idx >= model.inputs())
            throw unresolved_ref("input index " + name + " out of range");
        return idx;
    }
    throw unresolved_ref("no input labeled '" + name + "'");
}

transfer_query make_query(const state_space_block& model,
                          const run_options& options) {
    transfer_query q;
    q.kind = query_kind(options.query);
    q.control_index = options.control_index;
    if (q.kind == transfer_kind::ref_to_state) {
        if (options.state.empty())
            throw unresolved_ref("ref_to_state requires --state");
        q.state_index = resolve_state(model, options.state);
    }
    return q;
}

json matrix_to_json(const matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json table_to_json(const result_table& table) {
    json j;
    j["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) rows.push_back(row);
    j["rows"] = std::move(rows);
    return j;
}

std::string emit(const result_table& table, output_format format) {
    if (format == output_format::csv) return render_csv(table);
    return table_to_json(table).dump(2) + "\n";
}

std::string run_build(const state_space_block& model, output_format format) {
    if (format == output_format::json) {
        json j;
        j["n"] = model.states();
        j["q"] = model.controls();
        j["state_labels"] = model.state_labels();
        j["control_labels"] = model.control_labels();
        j["matrices"] = {{"a", matrix_to_json(model.a())},
                         {"b", matrix_to_json(model.b())},
                         {"c", matrix_to_json(model.c())},
                         {"d", matrix_to_json(model.d())}};
        return j.dump(2) + "\n";
    }
    // CSV: flat (matrix, row, col, value) tuples; 0=A, 1=B, 2=C, 3=D.
    result_table table;
    table.columns = {"matrix", "row", "col", "value"};
    const matrix* mats[] = {&model.a(), &model.b(), &model.c(), &model.d()};
    for (int m = 0; m < 4; ++m)
        for (Eigen::Index r = 0; r < mats[m]->rows(); ++r)
            for (Eigen::Index c = 0; c < mats[m]->cols(); ++c)
                table.rows.push_back({static_cast<double>(m),
                                      static_cast<double>(r),
                                      static_cast<double>(c), (*mats[m])(r, c)});
    return render_csv(table);
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_csv(const result_table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

int exit_code_for(const error& e) {
    if (dynamic_cast<const parse_error*>(&e) ||
        dynamic_cast<const schema_violation*>(&e) ||
        dynamic_cast<const unresolved_ref*>(&e))
        return 1;
    if (dynamic_cast<const singular_at_s*>(&e) ||
        dynamic_cast<const zero_admittance*>(&e) ||
        dynamic_cast<const unstable_block*>(&e) ||
        dynamic_cast<const bad_grid*>(&e))
        return 3;
    return 2;
}

std::string run_command(const netlist_doc& doc, const run_options& options) {
    const state_space_block model = build_model(doc);

    switch (options.cmd) {
    case command::build:
        return run_build(model, options.format);

    case command::tf: {
        if (options.frequencies.empty())
            throw bad_grid("tf needs at least one frequency");
        const auto q = make_query(model, options);
        result_table table;
        table.columns = {"f_hz", "real", "imag"};
        for (const double f : options.frequencies) {
            const cplx s(0.0, 2.0 * std::numbers::pi * f);
            const cplx g = named_transfer(model, q, s);
            table.rows.push_back({f, g.real(), g.imag()});
        }
        return emit(table, options.format);
    }

    case command::bode: {
        const auto q = make_query(model, options);
        result_table table;
        table.columns = {"f_hz", "mag_db", "phase_deg", "ok"};
        for (const auto& p : bode_sweep(model, q, options.grid))
            table.rows.push_back({p.f_hz, p.mag_db, p.phase_deg, p.ok ? 1.0 : 0.0});
        return emit(table, options.format);
    }

    case command::step: {
        const int input = resolve_input(model, options.input);
        const auto series = step_study(model, input, options.amplitude,
                                       options.duration, options.dt);
        result_table table;
        table.columns.push_back("t");
        for (const auto& name : series.channels) table.columns.push_back(name);
        for (std::size_t k = 0; k < series.t.size(); ++k) {
            std::vector<double> row;
            row.reserve(series.channels.size() + 1);
            row.push_back(series.t[k]);
            for (Eigen::Index c = 0; c < series.samples.cols(); ++c)
                row.push_back(series.samples(static_cast<Eigen::Index>(k), c));
            table.rows.push_back(std::move(row));
        }
        return emit(table, options.format);
    }

    case command::poles: {
        auto ps = poles(model);
        std::sort(ps.begin(), ps.end(), [](const cplx& a, const cplx& b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        result_table table;
        table.columns = {"re", "im", "stable"};
        bool all_stable = true;
        for (const auto& p : ps) {
            const bool st = p.real() < 0.0;
            all_stable = all_stable && st;
            table.rows.push_back({p.real(), p.imag(), st ? 1.0 : 0.0});
        }
        if (options.format == output_format::json) {
            json j = table_to_json(table);
            j["all_stable"] = all_stable;
            return j.dump(2) + "\n";
        }
        return render_csv(table);
    }
    }
    throw error("unknown command");
}

}  // namespace twoport
