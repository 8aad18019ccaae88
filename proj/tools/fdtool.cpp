// Batch job runner: reads a JSON job file, dispatches to the library, and
// writes report.json plus CSV traces. Exit codes: 0 success, 2 validation
// error, 3 numeric failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fdtk/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Removability analysis of isolated singularities of "
                 "finite-distortion mappings"};

    std::string config_path;
    std::string out_dir = ".";
    int quad_order = 0;
    int eps_decades = 0;
    unsigned seed = 0;
    int workers = 0;
    bool json_only = false;

    app.add_option("--config", config_path, "job file (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--quad-order", quad_order, "quadrature order override");
    app.add_option("--eps-decades", eps_decades, "epsilon-grid decades override");
    app.add_option("--seed", seed, "seed for randomized property suites");
    app.add_option("--workers", workers, "parallel workers for suite rows");
    app.add_flag("--json-only", json_only, "print the JSON report only");

    CLI11_PARSE(app, argc, argv);

    fdtk::json error;
    try {
        std::ifstream in(config_path);
        if (!in) throw fdtk::ValidationError("cannot open config: " + config_path);
        fdtk::json j = fdtk::json::parse(in);
        fdtk::JobConfig cfg = fdtk::parse_job_config(j);
        if (quad_order > 0) cfg.quad_order = quad_order;
        if (eps_decades > 0) cfg.eps_decades = eps_decades;
        if (seed > 0) cfg.seed = seed;
        if (workers > 0) cfg.workers = workers;

        fdtk::ReportBundle bundle = fdtk::run_job(cfg);
        bundle.write(out_dir);

        if (json_only) {
            std::cout << bundle.report.dump(2) << "\n";
        } else {
            std::cout << "command: " << cfg.command << " (n = " << cfg.n << ")\n";
            if (cfg.command == "reproduce") {
                bool all = bundle.report["result"]["all_pass"].get<bool>();
                for (const auto& row : bundle.report["result"]["rows"])
                    std::cout << (row["pass"].get<bool>() ? "  pass  " : "  FAIL  ")
                              << row["name"].get<std::string>() << "\n";
                std::cout << (all ? "all rows pass" : "SOME ROWS FAILED") << "\n";
                if (!all) return 3;
            } else {
                std::cout << bundle.report["result"].dump(2) << "\n";
            }
            std::cout << "report written to " << out_dir << "/report.json\n";
        }
        if (cfg.command == "reproduce" &&
            !bundle.report["result"]["all_pass"].get<bool>())
            return 3;
        return 0;
    } catch (const fdtk::ValidationError& e) {
        error = {{"error", "validation"}, {"message", e.what()}};
        std::cerr << error.dump() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        error = {{"error", "validation"}, {"message", e.what()}};
        std::cerr << error.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        error = {{"error", "validation"}, {"message", e.what()}};
        std::cerr << error.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        error = {{"error", "numeric"}, {"message", e.what()}};
        std::cerr << error.dump() << "\n";
        return 3;
    }
}
