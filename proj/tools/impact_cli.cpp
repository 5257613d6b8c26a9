#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "impact/pipeline.hpp"

namespace {

using StageFn = impact::StageInfo (*)(const impact::PipelineConfig&, const std::filesystem::path&);

const std::map<std::string, StageFn>& stage_map() {
    static const std::map<std::string, StageFn> map = {
        {"synth", &impact::stage_synth},     {"ingest", &impact::stage_ingest},
        {"respond", &impact::stage_respond}, {"fit", &impact::stage_fit},
        {"asym", &impact::stage_asym},       {"spectra", &impact::stage_spectra},
        {"entropy", &impact::stage_entropy}, {"network", &impact::stage_network}};
    return map;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-time price impact pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_value = 0;
    std::string out_override;
    std::vector<std::string> case_names;
    int random_l = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "pipeline config JSON file");
        if (config_required) opt->required();
        sub->add_option("--seed", seed_value, "override the root seed");
        sub->add_option("--out", out_override, "override the output directory");
    };
    auto add_case = [&](CLI::App* sub) {
        sub->add_option("--case", case_names,
                        "restrict to these response cases (all|single|multiple|weighted|random)");
    };

    CLI::App* sub_synth = app.add_subcommand("synth", "generate the synthetic message stream");
    add_common(sub_synth, true);
    CLI::App* sub_ingest =
        app.add_subcommand("ingest", "reconstruct per-stock quote and trade tapes");
    add_common(sub_ingest, true);
    CLI::App* sub_respond =
        app.add_subcommand("respond", "compute event-time response matrices");
    add_common(sub_respond, true);
    add_case(sub_respond);
    sub_respond->add_option("--random-L", random_l,
                            "inner dimension of the random baseline (0: median count)");
    CLI::App* sub_fit = app.add_subcommand("fit", "fit stable laws to pooled responses");
    add_common(sub_fit, true);
    add_case(sub_fit);
    CLI::App* sub_asym = app.add_subcommand("asym", "quantify response-matrix asymmetry");
    add_common(sub_asym, true);
    add_case(sub_asym);
    CLI::App* sub_spectra =
        app.add_subcommand("spectra", "antisymmetric eigenvalue spectra and semicircle fit");
    add_common(sub_spectra, true);
    add_case(sub_spectra);
    CLI::App* sub_entropy =
        app.add_subcommand("entropy", "entropy of the response probability matrices");
    add_common(sub_entropy, true);
    add_case(sub_entropy);
    CLI::App* sub_network = app.add_subcommand("network", "directional impact networks");
    add_common(sub_network, true);
    add_case(sub_network);
    CLI::App* sub_run = app.add_subcommand("run-all", "run every stage and write the report");
    add_common(sub_run, true);
    add_case(sub_run);
    sub_run->add_option("--random-L", random_l,
                        "inner dimension of the random baseline (0: median count)");
    CLI::App* sub_report =
        app.add_subcommand("report", "rebuild the summary report from a completed run");
    add_common(sub_report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        impact::PipelineConfig cfg;
        const bool have_config = sub->count("--config") > 0;
        if (have_config) {
            cfg = impact::pipeline_config_from_json(impact::read_text_file(config_path));
            if (sub->count("--seed") > 0) cfg.seed = seed_value;
            if (sub->count("--out") > 0) cfg.out_dir = out_override;
            if (!case_names.empty()) {
                cfg.cases.clear();
                for (const std::string& c : case_names) {
                    cfg.cases.push_back(impact::case_from_name(c));
                }
            }
            const CLI::Option* random_opt = sub->get_option_no_throw("--random-L");
            if (random_opt != nullptr && random_opt->count() > 0) cfg.random_L = random_l;
        }

        if (name == "run-all") {
            const impact::RunOutcome outcome = impact::run_pipeline(cfg);
            print_warnings(outcome.warnings);
            std::cout << outcome.report_text;
            return 0;
        }
        if (name == "report") {
            std::filesystem::path dir;
            if (sub->count("--out") > 0) {
                dir = out_override;
            } else if (have_config) {
                dir = cfg.out_dir;
            } else {
                throw impact::ValidationError("report: provide --out or --config");
            }
            std::cout << impact::report_run(dir);
            return 0;
        }
        const impact::StageInfo info = stage_map().at(name)(cfg, cfg.out_dir);
        print_warnings(info.warnings);
        return 0;
    } catch (const impact::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const impact::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const impact::StreamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const impact::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const impact::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
