#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "impact/response.hpp"
#include "impact/synth.hpp"

namespace impact {

/*
 * Pipeline orchestration: ingest -> respond -> fit -> asym -> spectra ->
 * entropy -> network -> report, with every stage reading its inputs from the
 * run directory's persisted artifacts (CSV/JSON). Chained and stage-by-stage
 * executions therefore produce identical bytes, and a single root seed split
 * per stage makes reruns with the same config byte-identical (wall-clock
 * timings live in the timings.json sidecar, outside that guarantee).
 */
struct PipelineConfig {
    // Input source: a message CSV, or a synthetic stream when use_synth.
    std::string messages_csv;
    bool messages_have_header = true;
    bool use_synth = false;
    SynthConfig synth; // synth.seed is derived from the root seed below

    // Optional session window (inclusive); -1 leaves a bound open.
    std::int64_t session_start_ms = -1;
    std::int64_t session_end_ms = -1;

    std::vector<ResponseCase> cases{ResponseCase::all, ResponseCase::single,
                                    ResponseCase::multiple, ResponseCase::weighted,
                                    ResponseCase::random};
    int k_bins = 50;   // response-distribution bins (fits, entropy)
    int q_groups = 4;  // impact-strength groups for the networks
    int random_L = 0;  // 0: median observation count per cell
    double network_lo = 0.6;
    double network_hi = 0.75;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

// JSON round-trip. from_json rejects unknown keys and invalid values;
// to_json emits the canonical echo (stable key order) used for hashing.
PipelineConfig pipeline_config_from_json(const std::string& text);
std::string pipeline_config_to_json(const PipelineConfig& config);

// Inverse of case_name; unknown names throw ValidationError.
ResponseCase case_from_name(const std::string& name);

// FNV-1a (64-bit) over the canonical config echo, as "0x" + 16 hex digits.
std::string config_hash_hex(const PipelineConfig& config);

// Per-stage seeds derived from the root seed.
std::uint64_t stage_seed(std::uint64_t root_seed, const std::string& stage);

// What a stage reports back for the run manifest.
struct StageInfo {
    std::vector<std::string> warnings;
    std::map<std::string, std::string> facts;
};

/*
 * Stages. Each one loads what it needs from `out` and writes its artifacts
 * back into `out`:
 *   ingest    messages (or synth) -> quotes_<SYM>.csv, trades_<SYM>.csv,
 *             metadata.csv (+ messages.csv, synth_manifest.json for synth)
 *   respond   tapes -> responses_<case>.csv, counts_*.csv, weights.csv
 *   fit       responses -> stable_fits.json, histogram_<case>.csv
 *   asym      responses -> asymmetry_<case>.csv
 *   spectra   responses -> spectrum_<case>.csv, spectrum_hist_<case>.csv,
 *             b_rescaled.json
 *   entropy   responses + fits + metadata -> entropy_matrix_<case>.csv,
 *             entropies_<case>.csv
 *   network   entropy matrices -> network_<case>.dot, edges_threshold_<case>.csv,
 *             edges_groups_<case>.csv, connectivity_by_group_<case>.csv
 */
StageInfo stage_ingest(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_respond(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_fit(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_asym(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_spectra(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_entropy(const PipelineConfig& config, const std::filesystem::path& out);
StageInfo stage_network(const PipelineConfig& config, const std::filesystem::path& out);

// Generates the synthetic stream only (messages.csv + synth_manifest.json).
StageInfo stage_synth(const PipelineConfig& config, const std::filesystem::path& out);

struct RunOutcome {
    std::filesystem::path out_dir;
    std::vector<std::string> warnings;
    std::string report_text;
};

// Runs every stage in order, then writes report.txt/report.json,
// manifest.json and the timings.json sidecar. Stage errors are rethrown
// with the stage name and run directory prepended.
RunOutcome run_pipeline(const PipelineConfig& config);

// Builds the summary (response-distribution stats, overall asymmetry and
// spectrum entropy per case, plus the fit table) from a completed run
// directory; writes report.txt and report.json and returns the text.
// Missing per-case artifacts become flagged gaps, not errors.
std::string report_run(const std::filesystem::path& out);

} // namespace impact
