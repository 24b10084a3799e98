// ddirac: run a built-in discrete Dirac system from a JSON configuration.
//
// Exit codes: 0 success, 1 invalid configuration or I/O problem, 2 a step failed
// (partial output is still written).

#include <ddirac/cli/run.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Integrate discrete Dirac mechanical systems"};
    std::string config_path;
    std::string output;
    std::string format;
    long long steps = -1;
    bool quiet = false;
    app.add_option("config", config_path, "JSON run configuration")->required();
    app.add_option("-o,--output", output, "Output path ('-' for standard output)");
    app.add_option("-f,--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-n,--steps", steps, "Override the number of steps")->check(CLI::NonNegativeNumber);
    app.add_flag("-q,--quiet", quiet, "Do not print the run summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    using namespace ddirac;
    cli::RunConfig cfg;
    try {
        cfg = cli::load_config(config_path);
        if (!output.empty()) cfg.output.path = output;
        if (!format.empty()) cfg.output.format = cli::parse_format(format, "--format");
        if (steps >= 0) cfg.steps = static_cast<std::size_t>(steps);
    } catch (const cli::ConfigError& e) {
        std::cerr << "ddirac: " << config_path << ": " << e.what() << '\n';
        return 1;
    }

    const bool to_stdout = cfg.output.path == "-";
    std::ofstream file;
    if (!to_stdout) {
        file.open(cfg.output.path);
        if (!file) {
            std::cerr << "ddirac: cannot open '" << cfg.output.path << "' for writing\n";
            return 1;
        }
    }
    std::ostream& data = to_stdout ? std::cout : file;
    std::ostream& report = to_stdout ? std::cerr : std::cout;

    cli::RunOutcome outcome;
    try {
        outcome = cli::run(cfg, data);
    } catch (const Error& e) {
        std::cerr << "ddirac: " << e.what() << '\n';
        return 1;
    }
    data.flush();

    for (const auto& w : outcome.trajectory.warnings) std::cerr << "ddirac: warning: " << w << '\n';
    if (!quiet) cli::print_summary(report, outcome.summary);
    if (outcome.summary.failure) {
        std::cerr << "ddirac: step " << outcome.summary.failure->step
                  << " failed: " << outcome.summary.failure->message << '\n';
        return 2;
    }
    return 0;
}
