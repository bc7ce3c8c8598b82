#pragma once

#include <string>
#include <vector>

#include "twoport/analysis.hpp"
#include "twoport/netlist.hpp"

namespace twoport {

/// Rectangular numeric result with named columns.
struct result_table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

enum class output_format { csv, json };

enum class command { build, tf, bode, step, poles };

/// Options for one CLI invocation (already parsed).
struct run_options {
    command cmd = command::build;
    output_format format = output_format::csv;

    // tf / bode
    std::string query;                // named transfer, e.g. "output_impedance"
    int control_index = 0;            // --k
    std::string state;                // --state (label or index, ref_to_state)
    std::vector<double> frequencies;  // tf --freq

    // bode
    frequency_grid grid;

    // step
    std::string input;                // --input (label or index)
    double amplitude = 0.0;
    double duration = 0.0;
    double dt = 0.0;
};

/// Executes one command against a parsed document and returns the exact
/// output bytes (deterministic for fixed document + options).
std::string run_command(const netlist_doc& doc, const run_options& options);

/// Exit code classification: 0 ok, 1 parse/schema/reference, 2 model
/// construction and composition, 3 analysis.
int exit_code_for(const error& e);

/// Formats a double with 17 significant digits (round-trip safe).
std::string format_number(double v);

std::string render_csv(const result_table& table);

}  // namespace twoport
