#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twoport/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw twoport::parse_error("cannot read netlist file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw twoport::error("cannot open output file '" + path + "'");
    out << bytes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compositional two-port state-space modeling of DC-DC "
                 "converter systems"};
    app.require_subcommand(1);

    std::string doc_path, out_path, format = "csv";
    twoport::run_options options;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("doc", doc_path, "netlist document (JSON)")->required();
        cmd->add_option("--out", out_path, "output file (default stdout)");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* build = app.add_subcommand("build", "compose the model and dump it");
    add_common(build);

    auto* tf = app.add_subcommand("tf", "evaluate a named transfer function");
    add_common(tf);
    tf->add_option("--query", options.query, "transfer function name")
        ->required()
        ->check(CLI::IsMember({"control_to_output", "output_impedance",
                               "input_admittance", "input_impedance",
                               "forward_voltage_gain", "reverse_current_gain",
                               "ref_to_state"}));
    tf->add_option("--k", options.control_index, "control input index");
    tf->add_option("--state", options.state, "state label or index");
    tf->add_option("--freq", options.frequencies, "frequencies in Hz")
        ->required()
        ->delimiter(',');

    auto* bode = app.add_subcommand("bode", "magnitude/phase sweep");
    add_common(bode);
    bode->add_option("--query", options.query, "transfer function name")
        ->required()
        ->check(CLI::IsMember({"control_to_output", "output_impedance",
                               "input_admittance", "input_impedance",
                               "forward_voltage_gain", "reverse_current_gain",
                               "ref_to_state"}));
    bode->add_option("--k", options.control_index, "control input index");
    bode->add_option("--state", options.state, "state label or index");
    bode->add_option("--fstart", options.grid.f_start, "start frequency [Hz]");
    bode->add_option("--fstop", options.grid.f_stop, "stop frequency [Hz]");
    bode->add_option("--ppd", options.grid.points_per_decade,
                     "points per decade");

    auto* step = app.add_subcommand("step", "small-signal step response");
    add_common(step);
    step->add_option("--input", options.input, "input label or index")
        ->required();
    step->add_option("--amp", options.amplitude, "step amplitude")->required();
    step->add_option("--dur", options.duration, "duration [s]")->required();
    step->add_option("--dt", options.dt, "time step [s]")->required();

    auto* poles_cmd = app.add_subcommand("poles", "eigenvalues and stability");
    add_common(poles_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (build->parsed()) options.cmd = twoport::command::build;
    if (tf->parsed()) options.cmd = twoport::command::tf;
    if (bode->parsed()) options.cmd = twoport::command::bode;
    if (step->parsed()) options.cmd = twoport::command::step;
    if (poles_cmd->parsed()) options.cmd = twoport::command::poles;
    options.format = format == "json" ? twoport::output_format::json
                                      : twoport::output_format::csv;

    try {
        const auto doc = twoport::parse_netlist(read_file(doc_path));
        write_output(out_path, twoport::run_command(doc, options));
    } catch (const twoport::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return twoport::exit_code_for(e);
    }
    return 0;
}
