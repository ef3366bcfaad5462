// Batch scenario runner and field-dump utilities for the biquaternion
// electro-gravimagnetic field library.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "egm/errors.hpp"
#include "egm/parallel.hpp"
#include "egm/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"egm - biquaternion EGM field scenarios and audits"};
    app.require_subcommand(1);

    int threads = 0;

    // egm run <scenario.json> [--threads N] [--out DIR] [--override key=value]
    auto* run = app.add_subcommand("run", "run a scenario file");
    std::string scenario_path, out_dir = ".";
    std::vector<std::string> overrides;
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--threads", threads, "worker cap (0 = hardware)");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--override", overrides, "dotted key=value override, repeatable");

    // egm audit <fields.csv> --law <name> [--theta CSV] [--tol X] [--report F]
    auto* audit = app.add_subcommand("audit", "audit a field dump against one law");
    std::string audit_csv, audit_law, audit_theta, audit_report;
    double audit_tol = 1e-9;
    audit->add_option("fields", audit_csv, "field dump CSV")->required();
    audit->add_option("--law", audit_law, "maxwell|charge|energy|wave|inertia")->required();
    audit->add_option("--theta", audit_theta, "charge-current CSV (second operand)");
    audit->add_option("--tol", audit_tol, "pass tolerance");
    audit->add_option("--report", audit_report, "write the audit JSON here");
    audit->add_option("--threads", threads, "worker cap (0 = hardware)");

    // egm transform <fields.csv> --v 0.6 --e 1,0,0 [--phi P] [--out CSV]
    auto* tr = app.add_subcommand("transform", "boost/rotate a field dump");
    std::string tr_csv, tr_out = "transformed.csv", tr_report;
    double tr_v = 0.0, tr_phi = 0.0;
    std::vector<double> tr_axis{1.0, 0.0, 0.0};
    tr->add_option("fields", tr_csv, "field dump CSV")->required();
    tr->add_option("--v", tr_v, "boost speed, |v| < 1");
    tr->add_option("--e", tr_axis, "boost/rotation axis")->expected(3)->delimiter(',');
    tr->add_option("--phi", tr_phi, "rotation half-angle");
    tr->add_option("--out", tr_out, "output CSV");
    tr->add_option("--report", tr_report, "write the transform report here");
    tr->add_option("--threads", threads, "worker cap (0 = hardware)");

    CLI11_PARSE(app, argc, argv);
    egm::set_max_threads(threads);

    try {
        if (run->parsed()) {
            const egm::ScenarioOutcome out = egm::run_scenario(scenario_path, overrides, out_dir);
            return out.exit_code;
        }
        if (audit->parsed())
            return egm::run_audit_command(audit_csv, audit_law, audit_theta, audit_tol,
                                          audit_report);
        if (tr->parsed())
            return egm::run_transform_command(
                tr_csv, tr_v, {tr_axis[0], tr_axis[1], tr_axis[2]}, tr_phi, tr_out, tr_report);
    } catch (const egm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const egm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
